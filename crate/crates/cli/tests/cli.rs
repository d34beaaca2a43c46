use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distortion-bounds"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn channel_file(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("channel.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ch = channel_file(&dir, r#"{"noise":[1],"power":50,"bandwidth":1}"#);
    let out = run(&[
        "--channel",
        &ch,
        "check",
        "--region",
        "inner",
        "--d",
        "0.0196078431372549",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["member"], true);
    assert!(v["slack"].as_f64().unwrap().abs() < 1e-9);

    // seven digits of 1/51 fall just short of the boundary
    let out = run(&[
        "--channel",
        &ch,
        "check",
        "--region",
        "inner",
        "--d",
        "0.0196078",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["member"], false);

    let out = run(&["check", "--region", "outer-k", "--d", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn errors_exit_one_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let ch = channel_file(&dir, "{noise");
    let out = run(&["--channel", &ch, "genie"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed channel JSON"));

    assert_eq!(
        run(&["check", "--region", "inner", "--d", "0.1,0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["nope"]).status.code(), Some(1));
    assert_eq!(
        run(&[
            "mi",
            "--tau",
            "0",
            "--tau-prime",
            "0.5",
            "--d",
            "0.1",
            "--samples",
            "20000"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn relax_genie_and_tau_reports() {
    let v = json(&run(&["relax", "--d", "0.1,0.04"]));
    assert_eq!(v["d_star"], serde_json::json!([0.2, 0.16]));
    assert_eq!(v["labels"], serde_json::json!([1, 1]));

    let v = json(&run(&["genie"]));
    let bits: Vec<f64> = v["rates_bits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((bits[0] - 0.792_481_250_360_578).abs() < 1e-12);
    assert!((bits[1] - 1.043_731_420_625_17).abs() < 1e-12);

    let v = json(&run(&[
        "tau",
        "--mode",
        "kfactor",
        "--d",
        "0.3,0.2,0.1",
        "--k",
        "3",
    ]));
    let tau = v["tau"].as_array().unwrap();
    assert!((tau[0].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert!((tau[1].as_f64().unwrap() - 41.0 / 43.0).abs() < 1e-12);
    assert_eq!(v["split_index"], 0);
    let res = v["residuals"].as_array().unwrap();
    assert!(res[0].as_f64().unwrap().abs() < 1e-12 && res[1].as_f64().unwrap().abs() < 1e-12);

    let v = json(&run(&["tau", "--mode", "kfactor", "--d", "0.9,0.2"]));
    assert_eq!(v["tau"], serde_json::json!(["inf"]));
    assert_eq!(v["split_index"], 1);
}

#[test]
fn gap_and_rates_reports() {
    let v = json(&run(&["gap", "--mode", "pow2", "--d", "0.5,0.0001"]));
    assert_eq!(v["factors"], serde_json::json!([2.0, 4.0]));
    assert_eq!(v["mode"], "pow2");
    assert!(v["inner_slack"].as_f64().unwrap() >= 0.0);
    let out = run(&["gap", "--mode", "pow2", "--d", "0.001,0.0001"]);
    assert_eq!(out.status.code(), Some(1));

    let v = json(&run(&["rates", "--d", "0.5,0.01"]));
    assert!((v["capacity_lhs"].as_f64().unwrap() - (9.0 * 2f64.sqrt() + 10.0)).abs() < 1e-12);
    let v = json(&run(&["rates", "--rates", "0,0"]));
    assert_eq!(v["d"], serde_json::json!([1.0, 1.0]));
}

#[test]
fn mi_report_is_seeded() {
    let args = [
        "mi",
        "--tau",
        "0",
        "--tau-prime",
        "0.5",
        "--d",
        "0.1",
        "--samples",
        "20000",
        "--seed",
        "3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!((v["lower_bound"].as_f64().unwrap() - 0.458_145_365_937_077_5).abs() < 1e-15);
}

#[test]
fn boundary_csv() {
    let out = run(&[
        "boundary",
        "--region",
        "parametric",
        "--tau",
        "0",
        "--points",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "free_coord,solved_coord,binding");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("3.8446751249519417e-4,2.7777777777777776e-2,budget"));

    let out = run(&["boundary", "--region", "inner", "--grid", "0.00001,0.001"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with("nan,infeasible"));
}

#[test]
fn fig2_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(&["--out", dir.path().to_str().unwrap(), "fig2"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "inner.csv",
            "outer_tau_0.05.csv",
            "outer_tau_0.2.csv",
            "outer_tau_0.csv",
            "outer_tau_1.csv",
            "outer_tau_5.csv",
            "outer_tau_inf.csv",
            "p2p.json"
        ]
    );
    for name in &names {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
    let inner = fs::read_to_string(a.path().join("inner.csv")).unwrap();
    assert_eq!(inner.lines().count(), 201);
}
