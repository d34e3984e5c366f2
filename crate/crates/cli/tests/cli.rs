use std::fs;
use std::process::{Command, Output};

use hecke_core::bounds::DensityBound;
use hecke_core::repro::ReproReport;

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const G_ALPHA: &str = r#"{"basis":"monomial","coeffs":["0","0","-4","0","5","0","-1"]}"#;

/// Semicircle CDF on [-2, 2].
fn st_cdf(t: f64) -> f64 {
    0.5 + (t * (4.0 - t * t).sqrt() + 4.0 * (t / 2.0).asin()) / (4.0 * std::f64::consts::PI)
}

#[test]
fn moments_second() {
    let o = hecke(&["moments", "--poly", r#"{"basis":"monomial","coeffs":["0","0","1"]}"#, "--hyp", "horizon"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1 (exact)");
}

#[test]
fn moments_beyond_horizon_is_precondition() {
    let o = hecke(&[
        "moments",
        "--poly",
        r#"{"basis":"hecke","coeffs":["0","0","0","0","0","0","0","0","0","1"]}"#,
        "--hyp",
        "horizon",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bound_band_one_two_with_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("g_alpha.json");
    fs::write(&w, G_ALPHA).unwrap();
    let out = dir.path().join("bound.json");
    let o = hecke(&[
        "bound",
        "--pattern",
        "positive_part",
        "--witness",
        w.to_str().unwrap(),
        "--region",
        "1,2",
        "--hyp",
        "horizon",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first: f64 = stdout(&o).lines().next().unwrap().trim().parse().unwrap();
    assert!((first - 0.164880).abs() < 2e-4);
    let text = fs::read_to_string(&out).unwrap();
    let b: DensityBound = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&b).unwrap().trim(), text.trim());
}

#[test]
fn bound_request_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("req.json");
    fs::write(
        &req,
        r#"{"witness":{"basis":"monomial","coeffs":["-2","0","17/9","0","0","0","2/9","0","-1/14"]},
            "region":[["-1","1"]],"hypothesis":"ramanujan","pattern":"shifted_square",
            "overrides":{"sup":"15.093","inf":"0.039"}}"#,
    )
    .unwrap();
    let o = hecke(&["--json", "bound", req.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: DensityBound = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(format!("{:.4e}", b.bound_f64()), "1.0077e-4");
    assert!(b.uses_overrides());
}

#[test]
fn conditional_bound_fails_without_ramanujan() {
    let q = r#"{"basis":"monomial","coeffs":["0","0","0","0","-2","0","1"]}"#;
    let ok =
        hecke(&["bound", "--pattern", "positive_part", "--witness", q, "--region", "sqrt(2),2", "--hyp", "ramanujan"]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert_eq!(stdout(&ok).lines().next().unwrap(), "0.031250");
    let bad =
        hecke(&["bound", "--pattern", "positive_part", "--witness", q, "--region", "sqrt(2),2", "--hyp", "horizon"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("sign condition"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hecke(&["simulate", "--n", "10"]).status.code(), Some(2));
    assert_eq!(hecke(&["search", "--start", G_ALPHA, "--region", "1,2"]).status.code(), Some(2));
    assert_eq!(
        hecke(&["bound", "--pattern", "bogus", "--witness", G_ALPHA, "--region", "1,2", "--hyp", "horizon"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hecke(&["moments", "--poly", "{", "--hyp", "horizon"]).status.code(), Some(2));
    assert_eq!(hecke(&["frobnicate"]).status.code(), Some(2));
    let o = hecke(&["reproduce", "--simulate", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).trim(), "error: --seed is required");
}

#[test]
fn zero_witness_is_precondition() {
    let o = hecke(&[
        "bound",
        "--pattern",
        "positive_part",
        "--witness",
        r#"{"basis":"monomial","coeffs":["0"]}"#,
        "--region",
        "1,2",
        "--hyp",
        "horizon",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reproduce_all_rows_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("repro.json");
    let o = hecke(&["reproduce", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("1to2b") && l.contains("density bound") && l.ends_with("MATCH")));
    assert!(text.lines().any(|l| l.starts_with("sato-tate(1,2)") && l.contains("quadrature") && l.ends_with("MATCH")));
    let r: ReproReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.mismatches(), 0);
}

#[test]
fn simulate_density_matches_semicircle() {
    let o = hecke(&["--json", "simulate", "--n", "1000000", "--seed", "7", "--density", "1,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ratio = v["density"]["ratio"].as_f64().unwrap();
    let se = v["density"]["std_error"].as_f64().unwrap();
    let want = 2.0 * (st_cdf(2.0) - st_cdf(1.0));
    assert!((ratio - want).abs() < 5.0 * se, "{ratio} vs {want}");
    assert!((ratio - 0.391).abs() < 2e-3);
}

#[test]
fn simulate_config_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    let csv = dir.path().join("sample.csv");
    fs::write(&cfg, format!(r#"{{"n": 50, "seed": 3, "moments": [2], "csv": {:?}}}"#, csv.to_str().unwrap())).unwrap();
    let a = hecke(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 50);
    let b = hecke(&["--config", cfg.to_str().unwrap(), "simulate", "--seed", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
    fs::write(&cfg, r#"{"n": 50, "sed": 3}"#).unwrap();
    assert_eq!(hecke(&["--config", cfg.to_str().unwrap(), "simulate"]).status.code(), Some(2));
}

#[test]
fn search_is_deterministic_and_never_regresses() {
    let args = [
        "--json",
        "search",
        "--start",
        G_ALPHA,
        "--region",
        "1,2",
        "--seed",
        "5",
        "--budget",
        "200",
        "--restarts",
        "3",
    ];
    let a = hecke(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&hecke(&args)));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let best: f64 = v["best_bound"]["bound"].as_str().map(to_f64).unwrap();
    let start: f64 = v["start_bound"]["bound"].as_str().map(to_f64).unwrap();
    assert!(best >= start && start > 0.1648);
}

fn to_f64(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn omega_on_sample_and_on_file() {
    let o = hecke(&["--json", "omega", "--x", "10000", "--seed", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v[0]["witness"]["realized_c"].as_f64().unwrap() > 0.0);
    assert_eq!(hecke(&["omega", "--x", "10000"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    fs::write(&csv, "2,1/2\n3,-3/2\n5,3/2\n7,-7/4\n").unwrap();
    let f = hecke(&["omega", "--data", csv.to_str().unwrap(), "--x", "2"]);
    assert!(f.status.success(), "{}", stderr(&f));
    fs::write(&csv, "2,1/2\n4,1\n").unwrap();
    assert_eq!(hecke(&["omega", "--data", csv.to_str().unwrap(), "--x", "2"]).status.code(), Some(2));
}
