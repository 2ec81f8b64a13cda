use std::process::{Command, Output};

use serde_json::Value;

fn kropina(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kropina"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn passing_builtin_exits_zero() {
    let o = kropina(&["run", "--builtin", "flat-parallel"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("flat-parallel: pass"));
}

#[test]
fn failing_check_exits_one() {
    let o = kropina(&["run", "--builtin", "perturbed", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "fail");
    for check in report["checks"].as_array().unwrap() {
        let expected = if check["name"] == "einstein" {
            "fail"
        } else {
            "pass"
        };
        assert_eq!(check["status"], expected, "{}", check["name"]);
    }
}

#[test]
fn invalid_configs_exit_two() {
    let o = kropina(&["run", "--builtin", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown builtin"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"dimension": 2, "mode": "kropina", "metric": ["1", "0", "1"], "form": ["1 +", "0"],
            "chart": {"box": {"lower": [-1, -1], "upper": [1, 1]}}, "checks": ["spray"]}"#,
    )
    .unwrap();
    let o = kropina(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = kropina(&["run", "--builtin", "example41", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 20 samples"));

    let o = kropina(&["run", "--builtin", "example41", "--tol", "bogus=1e-3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_reports_are_deterministic_up_to_wall_time() {
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        v["wall_time_ms"] = Value::Null;
        v
    };
    let args = [
        "run",
        "--builtin",
        "random-polynomial",
        "--format",
        "json",
        "--seed",
        "9",
    ];
    assert_eq!(strip(&kropina(&args)), strip(&kropina(&args)));
}

#[test]
fn config_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = kropina(&[
        "config",
        "--builtin",
        "spaceform",
        "--param",
        "mu=0",
        "--param",
        "c2=0",
    ]);
    assert_eq!(cfg.status.code(), Some(0), "{}", stderr(&cfg));
    let path = dir.path().join("spaceform.json");
    std::fs::write(&path, stdout(&cfg)).unwrap();
    let out = dir.path().join("report.json");
    let o = kropina(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(
        report["config"],
        serde_json::from_str::<Value>(&stdout(&cfg)).unwrap()
    );
}

#[test]
fn hyperbolic_space_form_fails_the_unit_norm_gate() {
    let o = kropina(&[
        "run",
        "--builtin",
        "spaceform",
        "--param",
        "mu=-1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let killing = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "killing")
        .unwrap();
    assert_eq!(killing["status"], "fail");
    assert!(killing["message"]
        .as_str()
        .unwrap()
        .contains("unit-norm gate"));
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let o = kropina(&["run", "--builtin", "example41", "--tol", "ricci=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn list_names_every_builtin() {
    let o = kropina(&["list"]);
    for name in kropina::builtins::NAMES {
        assert!(stdout(&o).contains(name));
    }
}
