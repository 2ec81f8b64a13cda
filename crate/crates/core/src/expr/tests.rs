use super::*;
use crate::jet::{Jet, JetSpace};
use crate::Error;
use alloc::string::ToString;
use alloc::vec::Vec;
use proptest::prelude::*;

const H: &str = "1 + (mu/4)*(x1^2+x2^2+x3^2)";

#[test]
fn spaceform_conformal_factor_parses() {
    let e = parse(H, 3, &["mu"]).unwrap();
    assert_eq!(e.evaluate(&[0.0, 0.0, 0.0], &[("mu", 7.0)]).unwrap(), 1.0);
    let v = e.evaluate(&[1.0, 2.0, 2.0], &[("mu", 1.0)]).unwrap();
    assert!((v - 3.25).abs() < 1e-15);
}

#[test]
fn dangling_operator_reports_offset() {
    match parse("x1 -", 1, &[]) {
        Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unary_minus_binds_looser_than_power() {
    let e = parse("-x1^2", 1, &[]).unwrap();
    assert_eq!(e.eval_real(&[2.0], &[]).unwrap(), -4.0);
    let e = parse("2^3^2", 1, &[]).unwrap();
    assert_eq!(e.eval_real(&[0.0], &[]).unwrap(), 512.0);
    let e = parse("x1^-1", 1, &[]).unwrap();
    assert_eq!(e.eval_real(&[4.0], &[]).unwrap(), 0.25);
    let e = parse("8 - 2 - 1", 1, &[]).unwrap();
    assert_eq!(e.eval_real(&[0.0], &[]).unwrap(), 5.0);
    let e = parse("8 / 2 / 2", 1, &[]).unwrap();
    assert_eq!(e.eval_real(&[0.0], &[]).unwrap(), 2.0);
}

#[test]
fn polynomial_plus_sine() {
    let e = parse("x1^2 + sin(x2)", 2, &[]).unwrap();
    assert_eq!(e.eval_real(&[2.0, 0.0], &[]).unwrap(), 4.0);
}

#[test]
fn jet_derivative_of_conformal_factor() {
    let e = parse(H, 3, &["mu"]).unwrap();
    let space = JetSpace::new(1, 1).unwrap();
    let x = [
        Jet::variable(&space, 1.0, 0).unwrap(),
        Jet::constant(&space, 1.0),
        Jet::constant(&space, 1.0),
    ];
    let h = e.evaluate(&x, &[("mu", 1.0)]).unwrap();
    assert!((h.first(0) - 0.5).abs() < 1e-15);
}

#[test]
fn identifier_errors() {
    assert!(matches!(
        parse("x4 + 1", 3, &[]),
        Err(Error::UnknownIdentifier { offset: 0, .. })
    ));
    assert!(matches!(
        parse("2*abs(x1)", 1, &[]),
        Err(Error::UnknownIdentifier { offset: 2, .. })
    ));
    assert!(matches!(
        parse("1 + k", 1, &[]),
        Err(Error::UnknownIdentifier { offset: 4, .. })
    ));
    assert!(matches!(
        parse("sin(x1, x1)", 1, &[]),
        Err(Error::Arity { found: 2, .. })
    ));
    assert!(matches!(
        parse("exp()", 1, &[]),
        Err(Error::Arity { found: 0, .. })
    ));
    assert!(matches!(parse("   ", 1, &[]), Err(Error::Syntax { .. })));
    assert!(matches!(
        parse("(x1", 1, &[]),
        Err(Error::Syntax { offset: 3, .. })
    ));
    assert!(matches!(
        parse("x1 $ 2", 1, &[]),
        Err(Error::Syntax { offset: 3, .. })
    ));
    assert!(matches!(parse("1e", 1, &[]), Err(Error::Syntax { .. })));
}

#[test]
fn evaluation_errors() {
    let e = parse("log(x1)", 1, &[]).unwrap();
    assert!(matches!(
        e.eval_real(&[-1.0], &[]),
        Err(Error::Domain { .. })
    ));
    let e = parse("1/x1", 1, &[]).unwrap();
    assert!(matches!(
        e.eval_real(&[0.0], &[]),
        Err(Error::DivisionByZero(_))
    ));
    let e = parse("mu", 1, &["mu"]).unwrap();
    assert!(matches!(
        e.eval_real(&[0.0], &[]),
        Err(Error::UnboundParameter(_))
    ));
    let e = parse("x2", 2, &[]).unwrap();
    assert!(matches!(
        e.eval_real(&[0.0], &[]),
        Err(Error::BindingCount { .. })
    ));
}

#[test]
fn variable_exponent_uses_exp_log() {
    let e = parse("x1^x2", 2, &[]).unwrap();
    let v = e.eval_real(&[2.0, 3.0], &[]).unwrap();
    assert!((v - 8.0).abs() < 1e-13);
}

#[test]
fn printing_is_parenthesized() {
    let e = parse("-x1^2 + 3*x2 - (-1.5)", 2, &[]).unwrap();
    assert_eq!(e.to_string(), "(((-(x1 ^ 2)) + (3 * x2)) - (-1.5))");
}

#[test]
fn builders_fold_identities() {
    let x = Expr::var(0);
    let zero = Expr::constant(0.0);
    let one = Expr::constant(1.0);
    assert_eq!(x.add(&zero), x);
    assert_eq!(x.mul(&one), x);
    assert_eq!(x.mul(&zero).as_constant(), Some(0.0));
    assert_eq!(zero.div(&x).as_constant(), Some(0.0));
    assert_eq!(Expr::sum([]).as_constant(), Some(0.0));
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-50.0f64..50.0).prop_map(Expr::constant),
        (0usize..3).prop_map(Expr::var),
        Just(Expr::param("mu")),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let funcs = [
            Func::Sqrt,
            Func::Exp,
            Func::Log,
            Func::Sin,
            Func::Cos,
            Func::Tan,
            Func::Atan,
        ];
        prop_oneof![
            inner.clone().prop_map(|e| e.neg()),
            (0usize..7, inner.clone()).prop_map(move |(f, e)| Expr::call(funcs[f], e)),
            (0usize..5, inner.clone(), inner).prop_map(|(op, a, b)| {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][op];
                Expr::binary(op, a, b)
            }),
        ]
    })
}

fn reals(e: &Expr) -> Vec<f64> {
    fn go(e: &Expr, out: &mut Vec<f64>) {
        match e.node() {
            Node::Const(v) => out.push(*v),
            Node::Neg(a) | Node::Call(_, a) => go(a, out),
            Node::Binary(_, a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}

proptest! {
    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let text = e.to_string();
        let once = parse(&text, 3, &["mu"]).unwrap();
        let again = parse(&once.to_string(), 3, &["mu"]).unwrap();
        prop_assert_eq!(&once.to_string(), &again.to_string());
        prop_assert_eq!(once, again);
        // Negative literals print as negations, so compare magnitudes.
        let a: Vec<f64> = reals(&e).iter().map(|v| v.abs()).collect();
        let b: Vec<f64> = reals(&parse(&text, 3, &["mu"]).unwrap()).iter().map(|v| v.abs()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reals_match_order_zero_jets(
        e in arb_expr(),
        x in proptest::array::uniform3(-2.0f64..2.0),
        mu in -1.0f64..1.0,
    ) {
        let params = [("mu", mu)];
        let real = e.eval_real(&x, &params);
        let space = JetSpace::new(0, 3).unwrap();
        let jx: Vec<Jet> = x.iter().map(|&v| Jet::constant(&space, v)).collect();
        let jet = e.evaluate(&jx, &params);
        match (real, jet) {
            (Ok(r), Ok(j)) => prop_assert!(r == *j.value() || (r.is_nan() && j.value().is_nan()), "{} vs {}", r, j.value()),
            (Err(_), Err(_)) => {}
            (r, j) => prop_assert!(false, "real {:?} vs jet {:?} for {}", r, j.map(|j| *j.value()), e),
        }
    }
}

#[test]
fn shared_subtrees_evaluate_once_per_call() {
    let h = parse(H, 3, &["mu"]).unwrap();
    let inv = Expr::constant(1.0).div(&h.mul(&h));
    let big = Expr::sum([inv.clone(), inv.clone(), inv].iter());
    let v = big.eval_real(&[0.0, 0.0, 0.0], &[("mu", 1.0)]).unwrap();
    assert_eq!(v, 3.0);
    let all = Expr::evaluate_all(&[h.clone(), h], &[1.0, 0.0, 0.0], &[("mu", 4.0)]).unwrap();
    assert_eq!(all, [2.0, 2.0]);
}
