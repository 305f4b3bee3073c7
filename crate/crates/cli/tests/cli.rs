use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ri-copoly")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn table_one_passes_and_unknown_table_is_usage_error() {
    let out = run(&["table", "T1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["resolved_level"], 3);
    assert_eq!(run(&["table", "T9"]).status.code(), Some(2));
}

#[test]
fn failing_table_exits_one() {
    let out = run(&["table", "T2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["interlacing"], "unperturbed-starts");
}

#[test]
fn zeros_csv_layout() {
    let out = run(&["zeros", "--family", "builtin: example1", "--perturb", "k=3,mu=-1/2,nu=2", "--n", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,pert,n,j,zero,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16);
    let first_perturbed: f64 = rows[8].rsplit(',').nth(1).unwrap().parse().unwrap();
    assert!((first_perturbed + 0.1627959860).abs() < 1e-6);
}

#[test]
fn rational_mode_rejects_root_finding() {
    assert_eq!(run(&["--mode", "rational", "zeros", "--n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["--mode", "rational", "toda"]).status.code(), Some(2));
    let out = run(&["--mode", "rational", "--algebra-only", "toda", "--sched", "2,1/3,2"]);
    assert!(out.status.success());
}

#[test]
fn perturb_representation_agrees() {
    for p in ["k=0,mu=-2/3", "k=2,nu=3/2", "k=3,mu=1/3,nu=2"] {
        let out = run(&["perturb", "--perturb", p, "--n", "8"]);
        assert!(out.status.success(), "{p}");
        assert_eq!(json(&out)["agree"], true);
    }
}

#[test]
fn stieltjes_residuals_vanish_exactly() {
    let out = run(&[
        "stieltjes",
        "--family",
        "builtin: ljacobi, a=-12, c=-10",
        "--perturb",
        "k=1,mu=1/3,nu=2",
        "--depth",
        "4",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    for p in v["points"].as_array().unwrap() {
        for r in p["residuals"].as_array().unwrap() {
            assert_eq!(r["residual"], 0.0);
        }
    }
}

#[test]
fn chain_codilation_example() {
    let out = run(&["chain", "--perturb-nu", "1,1/2", "--szego", "6", "--n", "6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["minimal"][3], "3/8");
    let phi = v["phi"].as_array().unwrap();
    assert_eq!(phi[6][0], "-1/7+0i");
}

#[test]
fn reports_are_deterministic_and_out_writes_file() {
    let a = run(&["suite", "representation"]);
    let b = run(&["suite", "representation", "--sequential"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dir = std::env::temp_dir().join(format!("ri-copoly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t5.json");
    let out = run(&["table", "T5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["interlacing"], "violated");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn precision_env_var_is_read() {
    let with_env = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_ri-copoly"))
            .env("RI_COPOLY_PRECISION", v)
            .args(["table", "T1"])
            .output()
            .unwrap()
    };
    assert_eq!(with_env("1e-8").status.code(), Some(0));
    assert_eq!(with_env("0").status.code(), Some(2));
    assert_eq!(with_env("abc").status.code(), Some(2));
}
