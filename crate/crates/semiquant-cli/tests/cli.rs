//! End-to-end runs of the `semiquant` binary.

use proptest::prelude::*;
use semiquant_cli::config::*;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiquant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn harmonic_spectrum_csv() {
    let o = run(&["spectrum", "--symbol", "harmonic", "--h", "0.1", "--interval", "0.05,0.6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,E_bs,E_gram,det_residual"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 3);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (k + 1).to_string());
        let e: f64 = r[1].parse().unwrap();
        assert!((e - (2 * k + 1) as f64 * 0.1).abs() < 1e-9);
        let (mantissa, exp) = r[1].split_once('e').unwrap();
        assert_eq!(mantissa.split_once('.').unwrap().1.len(), 12);
        assert_eq!(exp.len(), 3);
    }
    assert!(text.ends_with('\n'));
}

#[test]
fn empty_interval_gives_empty_table_and_warning() {
    let o = run(&["spectrum", "--symbol", "harmonic", "--h", "0.1", "--interval", "1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,E_bs,E_gram,det_residual\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["spectrum", "--symbol", "nope", "--h", "0.1", "--interval", "0,1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--symbol", "harmonic", "--interval", "0,1"]).status.code(), Some(2));
    assert_eq!(run(&["actions", "--symbol", "schrodinger", "--V", "x^^2", "--E", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    // no orbit below the bottom of the well
    assert_eq!(run(&["actions", "--symbol", "harmonic", "--E", "-1"]).status.code(), Some(3));
}

#[test]
fn actions_json_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let o = run(&[
        "actions", "--symbol", "harmonic", "--E", "1", "--h", "0.1",
        "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["S0"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-9);
    assert!(v["S2"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[symbol]\nname = \"harmonic\"\n\n[spectrum]\nh = 0.2\ninterval = [0.1, 0.7]\nmethod = \"bs\"\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = stdout(&run(&["--config", c, "spectrum"]));
    assert_eq!(from_file.lines().count(), 1 + 2);
    let overridden = stdout(&run(&["--config", c, "spectrum", "--h", "0.1"]));
    // levels 0.1, 0.3, 0.5, 0.7 include both closed endpoints
    assert_eq!(overridden.lines().count(), 1 + 4);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[spectrum]\nstep = 1\n").unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "spectrum"]).status.code(), Some(2));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["orbit", "--symbol", "harper", "--E", "1.5", "--steps", "64"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# E=1.500000000000e+00,T="));
    assert_eq!(text.lines().nth(1), Some("t,x,xi"));
}

#[test]
fn reference_wkb_gram_and_airy_subcommands() {
    let r = run(&["reference", "--symbol", "harmonic", "--h", "0.1", "--Emax", "0.45", "--N", "128", "--L", "6"]);
    assert_eq!(r.status.code(), Some(0));
    let text = stdout(&r);
    assert_eq!(text.lines().next(), Some("index,eigenvalue,convergence_certificate"));
    assert_eq!(text.lines().count(), 1 + 2);

    let w = run(&["wkb", "--symbol", "harmonic", "--E", "1", "--h", "0.1", "--samples", "5", "--base", "left"]);
    assert_eq!(w.status.code(), Some(0));
    assert_eq!(stdout(&w).lines().count(), 1 + 5);

    let g = run(&["gram", "--symbol", "harmonic", "--h", "0.1", "--interval", "0.1,0.3", "--samples", "3"]);
    let rows: Vec<String> = stdout(&g).lines().skip(1).map(String::from).collect();
    let det = |row: &str| row.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    assert!(det(&rows[0]).abs() < 1e-12);
    assert!((det(&rows[1]) + 1.0).abs() < 1e-12);

    let a = run(&["airy-check", "--Q0", "x + 0.3*x^2", "--h-list", "0.1,0.05", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["master_residual_slope"].as_f64().unwrap() < -4.8);
    assert_eq!(v["ansatz_phase_error"].as_array().unwrap().len(), 2);
    assert_eq!(run(&["airy-check", "--Q0", "2*x"]).status.code(), Some(2));
}

#[test]
fn harmonic_convergence_skips_slope() {
    let o = run(&[
        "convergence", "--symbol", "harmonic", "--h-list", "0.1,0.05",
        "--interval", "0.05,0.6", "--N", "256", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["slope"].is_null());
    assert!(v["notice"].is_string());
}

fn opt_f64() -> impl Strategy<Value = Option<f64>> {
    prop::option::of(-1e6f64..1e6)
}

fn opt_expr() -> impl Strategy<Value = Option<String>> {
    prop::option::of("[a-z0-9+*^ .()-]{0,12}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        h in opt_f64(),
        lo in -10.0f64..10.0,
        width in 0.0f64..5.0,
        points in prop::option::of(8usize..4096),
        potential in opt_expr(),
        hs in prop::collection::vec(1e-4f64..1.0, 1..5),
        threads in prop::option::of(1usize..64),
        method in prop::option::of(prop_oneof![Just(Method::Bs), Just(Method::Gram), Just(Method::Both)]),
    ) {
        let cfg = RunConfig {
            output: OutputSection { threads, format: Some(Format::Json), ..Default::default() },
            symbol: SymbolArgs { name: Some("schrodinger".into()), potential, ..Default::default() },
            spectrum: SpectrumSection {
                h, interval: Some(Pair(lo, lo + width)), method, points, ..Default::default()
            },
            convergence: ConvergenceSection { h_list: Some(List(hs)), ..Default::default() },
            airy: AirySection { q0: Some("x + 0.3*x^2".into()), ..Default::default() },
            ..Default::default()
        };
        let text = cfg.to_text();
        prop_assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }
}
