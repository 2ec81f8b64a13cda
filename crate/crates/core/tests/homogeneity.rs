mod common;

use common::{fixtures, relative};
use kropina_core::kropina::{ricci_direct, s_curvature_direct, spray_first_principles};
use kropina_core::residual::normalized;

const FACTORS: [f64; 3] = [0.5, 2.0, 7.0];

fn scaled(y: &[f64], l: f64) -> Vec<f64> {
    y.iter().map(|v| v * l).collect()
}

#[test]
fn degrees_of_homogeneity() {
    for (name, k) in fixtures() {
        for s in k.samples(10, 11).unwrap().iter() {
            let f = k.f(&s.x, &s.y).unwrap();
            let g = spray_first_principles(&k, &s.x, &s.y).unwrap();
            let ric = ricci_direct(&k, &s.x, &s.y).unwrap();
            let sc = s_curvature_direct(&k, &s.x, &s.y).unwrap();
            for l in FACTORS {
                let y = scaled(&s.y, l);
                assert!(relative(k.f(&s.x, &y).unwrap(), l * f) < 1e-10, "{name} F");
                let gl = spray_first_principles(&k, &s.x, &y).unwrap();
                let scale: Vec<f64> = g.iter().map(|v| v * l * l).collect();
                for (a, b) in gl.iter().zip(&scale) {
                    assert!(normalized(a - b, &scale) < 1e-10, "{name} G");
                }
                let rl = ricci_direct(&k, &s.x, &y).unwrap();
                assert!(
                    normalized(rl - l * l * ric, &[l * l * ric]) < 1e-10,
                    "{name} Ric {rl} {ric}"
                );
                let sl = s_curvature_direct(&k, &s.x, &y).unwrap();
                assert!(normalized(sl - l * sc, &[l * sc]) < 1e-10, "{name} S");
            }
        }
    }
}
