use std::process::{Command, Output};

use serde_json::Value;

fn qp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpairings"))
        .args(args)
        .output()
        .expect("run qpairings")
}

fn json(args: &[&str]) -> Value {
    let out = qp(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(args: &[&str]) -> String {
    let out = qp(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn enumerate_k2_all() {
    let v = json(&["enumerate", "--k", "2", "--class", "all"]);
    let exps: Vec<u64> = v["pairings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["exponent"].as_u64().unwrap())
        .collect();
    assert_eq!(exps, [2, 4, 4]);
    assert_eq!(v["count"], 3);
    assert_eq!(v["total_at_p1"], "3");
}

#[test]
fn enumerate_empty_and_csv() {
    let v = json(&["enumerate", "--k", "0", "--class", "nc"]);
    assert_eq!(v["pairings"].as_array().unwrap().len(), 1);
    let csv = stdout(&["enumerate", "--k", "3", "--class", "nc", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,pairs,exponent"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn enumerate_cap_names_the_flag() {
    let out = qp(&["enumerate", "--k", "12", "--class", "all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap-all"));
    assert_eq!(qp(&["enumerate", "--k", "6", "--cap-all", "5"]).status.code(), Some(2));
    assert_eq!(
        qp(&["enumerate", "--k", "9", "--class", "nc", "--cap-nc", "8"])
            .status
            .code(),
        Some(2)
    );
    assert!(qp(&["enumerate", "--k", "7", "--cap-all", "7", "--format", "csv"])
        .status
        .success());
}

#[test]
fn bk_and_phi_tables() {
    let v = json(&["bk", "--k-max", "3", "--format", "json"]);
    let b3 = &v["entries"][3]["terms"];
    assert_eq!(*b3, serde_json::json!([[3, "1"], [5, "2"], [7, "1"], [9, "1"]]));
    let v = json(&["phi", "--k-max", "1"]);
    for k in 0..2 {
        assert_eq!(v["entries"][k]["terms"], serde_json::json!([[0, "1"]]));
    }
    let v = json(&["bk", "--k-max", "0"]);
    assert_eq!(v["entries"].as_array().unwrap().len(), 1);
    assert_eq!(v["entries"][0]["terms"], serde_json::json!([[0, "1"]]));
    let csv = stdout(&["phi", "--k-max", "4", "--format", "csv"]);
    assert!(csv.starts_with("k,exponent,coefficient\n"));
    assert!(csv.contains("# consistency"));
    assert!(qp(&["bk", "--k-max", "500"]).status.code() == Some(2));
}

#[test]
fn qrev_table() {
    let v = json(&["qrev", "--k-max", "3"]);
    assert!(v["entries"].as_array().unwrap().len() >= 3);
}

#[test]
fn moment_examples() {
    assert_eq!(
        json(&["moment", "--k", "3", "--p", "1", "--class", "all"])["value"],
        "15"
    );
    assert_eq!(
        json(&["moment", "--k", "1", "--p", "0.25", "--class", "nc"])["value"],
        "1/4"
    );
    assert_eq!(
        json(&[
            "moment",
            "--k",
            "2",
            "--p",
            "0.5",
            "--class",
            "all",
            "--backend",
            "exact"
        ])["value"],
        "3/8"
    );
    assert_eq!(
        json(&["moment", "--k", "2", "--p", "1/2", "--class", "nc"])["value"],
        "5/16"
    );
    let log = json(&["moment", "--k", "2", "--p", "0.5", "--backend", "log"]);
    assert!((log["value_f64"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    assert_eq!(qp(&["moment", "--k", "2", "--p", "-1"]).status.code(), Some(2));
    assert_eq!(qp(&["moment", "--k", "2", "--p", "3/2"]).status.code(), Some(2));
    assert!(qp(&["moment", "--k", "2", "--p", "3/2", "--allow-p-above-one"])
        .status
        .success());
}

#[test]
fn growth_rows() {
    let csv = stdout(&["growth", "--p", "1", "--k", "1", "--format", "csv"]);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    let csv = stdout(&["growth", "--p", "0.5", "--k", "100,200,400", "--format", "csv"]);
    let rates: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rates.len(), 3);
    assert!(rates.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn pc_without_sign_change_is_a_usage_error() {
    let out = qp(&[
        "pc",
        "--p-lo",
        "0.99",
        "--p-hi",
        "0.999",
        "--k-probe",
        "10",
        "--tol",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&["pc", "--p-lo", "0.1", "--p-hi", "0.99", "--k-probe", "200"]);
    assert!(v["width"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn simulate_requires_seed() {
    let out = qp(&["simulate", "--n", "3", "--k", "1", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn simulate_scalar_case() {
    let v = json(&[
        "simulate",
        "--n",
        "1",
        "--k",
        "2",
        "--p",
        "0.5",
        "--samples",
        "100000",
        "--seed",
        "7",
    ]);
    let (mean, se) = (v["mean"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    assert!((mean - 0.375).abs() <= 3.0 * se, "mean {mean} stderr {se}");
    assert_eq!(v["reference_Bk"], 0.3125);
    for key in ["config", "var_trace", "samples", "z_score"] {
        assert!(v.get(key).is_some());
    }
}

#[test]
fn simulate_two_factor_formula() {
    let v = json(&[
        "simulate",
        "--n",
        "100",
        "--k",
        "1",
        "--p",
        "0.9",
        "--samples",
        "50000",
        "--seed",
        "1",
    ]);
    let (mean, se) = (v["mean"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    let want = 0.9 * 101.0 / 100.0;
    assert!((mean - want).abs() <= 3.0 * se, "mean {mean} want {want} stderr {se}");
}

#[test]
fn simulate_kernel_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1\n1 0.9\n2 -0.9\n").unwrap();
    let out = qp(&[
        "simulate",
        "--n",
        "3",
        "--k",
        "1",
        "--seed",
        "1",
        "--kernel-file",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));

    let delta = dir.path().join("delta.txt");
    std::fs::write(&delta, "# independent factors\n0 1\n1 0\n2 0\n3 0\n").unwrap();
    let v = json(&[
        "simulate",
        "--n",
        "40",
        "--k",
        "2",
        "--seed",
        "3",
        "--samples",
        "4000",
        "--kernel-file",
        delta.to_str().unwrap(),
    ]);
    assert_eq!(v["reference_Bk"], 0.0);
    assert!(v["mean"].as_f64().unwrap().abs() <= 3.0 * v["stderr"].as_f64().unwrap());

    let missing = dir.path().join("missing.txt");
    let out = qp(&[
        "simulate",
        "--n",
        "3",
        "--k",
        "1",
        "--seed",
        "1",
        "--kernel-file",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_probes_and_csv() {
    let v = json(&[
        "simulate",
        "--n",
        "8",
        "--k",
        "1",
        "--p",
        "0.5",
        "--samples",
        "200",
        "--seed",
        "5",
        "--probe",
        "odd,variance",
        "--n-grid",
        "4,8",
    ]);
    assert_eq!(v["odd_probe"]["factors"], 3);
    assert_eq!(v["variance_probe"].as_array().unwrap().len(), 2);
    let out = qp(&[
        "simulate",
        "--n",
        "8",
        "--k",
        "1",
        "--p",
        "0.5",
        "--samples",
        "200",
        "--seed",
        "5",
        "--probe",
        "variance",
        "--n-grid",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let csv = stdout(&[
        "simulate",
        "--n",
        "8",
        "--k",
        "1",
        "--p",
        "0.5",
        "--samples",
        "200",
        "--seed",
        "5",
        "--format",
        "csv",
    ]);
    assert!(csv.starts_with("kind,n,k,factors,samples,mean,stderr,var_trace,reference,z_score\n"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bk.json");
    let args = ["bk", "--k-max", "6"];
    let direct = stdout(&args);
    let out = qp(&["bk", "--k-max", "6", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cmds: [&[&str]; 4] = [
        &["enumerate", "--k", "4", "--class", "nc"],
        &["phi", "--k-max", "12", "--format", "csv"],
        &["growth", "--p", "0.3,0.7", "--k", "10,20,40,80"],
        &[
            "simulate",
            "--n",
            "6",
            "--k",
            "2",
            "--p",
            "0.8",
            "--samples",
            "300",
            "--seed",
            "11",
        ],
    ];
    for args in cmds {
        assert_eq!(qp(args).stdout, qp(args).stdout, "{args:?}");
    }
}

#[test]
fn selfcheck_passes() {
    let out = qp(&["selfcheck"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(qp(&["--help"]).status.code(), Some(0));
    assert_eq!(qp(&["moment", "--k", "x", "--p", "1"]).status.code(), Some(2));
    assert_eq!(qp(&["nonsense"]).status.code(), Some(2));
}
