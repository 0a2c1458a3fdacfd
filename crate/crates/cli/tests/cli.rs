use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use usefulness_cli::args::{Generator, SimulateArgs};
use usefulness_cli::config::{Analysis, RunConfig};
use usefulness_cli::simulate::simulated_panel;
use usefulness_cli::{analyze, UsefulnessReport};
use usefulness_core::entropy::Method;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_usefulness"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small factor panel written by the binary.
fn factor_csv(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("factor.csv");
    ok(&[
        "simulate",
        "factor-panel",
        "--assets",
        "5",
        "--factors",
        "2",
        "--T",
        "1200",
        "--phi",
        "0.3",
        "--seed",
        "11",
        "--output",
        s(&path),
    ]);
    path
}

fn report(bytes: &[u8]) -> UsefulnessReport {
    serde_json::from_slice(bytes).expect("report parses")
}

#[test]
fn simulate_then_analyze_is_bit_reproducible() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for round in 0..2 {
        let csv = dir.path().join(format!("t{round}.csv"));
        ok(&[
            "simulate",
            "student-t-ar1",
            "--phi",
            "0.5",
            "--nu",
            "4",
            "--T",
            "2000",
            "--seed",
            "7",
            "--output",
            s(&csv),
        ]);
        reports.push((std::fs::read(&csv).unwrap(), csv));
    }
    assert_eq!(reports[0].0, reports[1].0);

    // Single-column panel: pair it with a second generated series.
    let pool = dir.path().join("pool.csv");
    ok(&["simulate", "gaussian-white", "--dim", "2", "--T", "2000", "--seed", "8", "--output", s(&pool)]);
    let text = std::fs::read_to_string(&reports[0].1).unwrap();
    let pool_text = std::fs::read_to_string(&pool).unwrap();
    let merged: String =
        text.lines().zip(pool_text.lines()).map(|(a, b)| format!("{a},{}\n", b.split_once(',').unwrap().1)).collect();
    let panel = dir.path().join("merged.csv");
    std::fs::write(&panel, merged).unwrap();

    let args = ["analyze", "--input", s(&panel), "--candidate", "y", "--method", "model-free", "--seed", "5"];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let r = report(&a);
    assert_eq!(r.assets.len(), 1);
    assert!(r.assets[0].id.is_some() && r.assets[0].passive.is_some());
}

#[test]
fn unknown_flag_exits_with_config_code() {
    let out = run(&["analyze", "--input", "x.csv", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus-flag"));
}

#[test]
fn unknown_figure_exits_with_config_code() {
    let out = run(&["figures", "histogram"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cli-reporting/UnknownFigure") && err.contains("histogram"), "{err}");
}

#[test]
fn data_errors_exit_with_data_code() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n0.1,0.2\n0.3,oops\n0.1,0.1\n").unwrap();
    let out = run(&["analyze", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("panel-core/MalformedCsv"));

    let out = run(&["analyze", "--input", s(&bad), "--p-value", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_round_trip_matches_in_memory_pipeline() {
    let dir = TempDir::new().unwrap();
    let csv = factor_csv(&dir);
    let from_disk = ok(&["analyze", "--input", s(&csv), "--seed", "3", "--q", "2"]);

    let sim = SimulateArgs {
        generator: Generator::FactorPanel(usefulness_cli::args::FactorArgs {
            assets: 5,
            factors: 2,
            len: 1200,
            det_target: 1.0,
            phi: 0.3,
            seed: 11,
        }),
        output: None,
        undated: false,
    };
    let panel = simulated_panel(&sim).unwrap();
    let mut cfg = RunConfig { input: Some(csv.clone()), seed: 3, ..RunConfig::default() };
    cfg.order_q.q = 2;
    let in_memory = analyze(&cfg, &panel).unwrap();
    assert_eq!(String::from_utf8(from_disk).unwrap(), in_memory.to_json().unwrap());
}

#[test]
fn subset_selection_omits_blocks_without_renaming() {
    let dir = TempDir::new().unwrap();
    let csv = factor_csv(&dir);
    let full: serde_json::Value = serde_json::from_slice(&ok(&["analyze", "--input", s(&csv), "--q", "2"])).unwrap();
    let part: serde_json::Value =
        serde_json::from_slice(&ok(&["analyze", "--input", s(&csv), "--q", "2", "--analyses", "id,it"])).unwrap();
    for (f, p) in full["assets"].as_array().unwrap().iter().zip(part["assets"].as_array().unwrap()) {
        let mut keys: Vec<&String> = p.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["asset", "id", "it", "pool"]);
        for k in keys {
            assert_eq!(f[k], p[k], "block {k} differs");
        }
        for k in ["id_q", "pr_auto", "pr_exo", "passive"] {
            assert!(f.get(k).is_some());
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let csv = factor_csv(&dir);
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(
        &cfg_path,
        format!(
            "input = {:?}\nseed = 9\nanalyses = [\"id\"]\n[estimator]\nmethod = \"nonparametric\"\nwindow = 50\n",
            s(&csv)
        ),
    )
    .unwrap();
    let r = report(&ok(&["analyze", "--config", s(&cfg_path), "--method", "maxent", "--candidate", "x1"]));
    assert_eq!(r.config.seed, 9);
    assert_eq!(r.config.estimator.method, Method::MaxEnt);
    assert_eq!(r.config.estimator.window, Some(50));
    assert_eq!(r.config.analyses, vec![Analysis::Id]);
    assert_eq!(r.assets[0].asset, "x1");

    std::fs::write(&cfg_path, "sed = 9\n").unwrap();
    let out = run(&["analyze", "--config", s(&cfg_path)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let csv = factor_csv(&dir);
    let args = ["analyze", "--input", s(&csv), "--analyses", "id,id-q", "--q", "2"];
    let default = ok(&args);
    let one = bin().args(args).env("USEFULNESS_THREADS", "1").output().unwrap();
    assert!(one.status.success());
    assert_eq!(default, one.stdout);
    assert_eq!(default, ok(&[&["--threads", "3"], &args[..]].concat()));
}

#[test]
fn output_files_and_summary_table() {
    let dir = TempDir::new().unwrap();
    let csv = factor_csv(&dir);
    let (json, table) = (dir.path().join("r.json"), dir.path().join("s.csv"));
    let stdout =
        ok(&["analyze", "--input", s(&csv), "--analyses", "id,pr", "--output", s(&json), "--summary-csv", s(&table)]);
    assert!(stdout.is_empty());
    let r: UsefulnessReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let text = std::fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + r.assets.len());
    assert!(lines[0].starts_with("asset,mi_rate_bits,id_periods_per_bit"));
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "x0");
    assert_eq!(first[1].parse::<f64>().unwrap(), r.assets[0].id.as_ref().unwrap().mi_rate_bits);
    assert_eq!(first[6], "", "tail impact was not requested");
}

#[test]
fn spi_test_reports_posterior_and_decisions() {
    let out = ok(&[
        "spi-test",
        "--reference-bsrs",
        "1.0",
        "--mu0",
        "0",
        "--nu0",
        "1",
        "--alpha0",
        "1",
        "--beta0",
        "1",
        "--bsr",
        "0.2,2.5",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["posterior"]["mu_n"], 0.5);
    assert_eq!(v["posterior"]["beta_n"], 1.25);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 2);
    assert_eq!(v["test_multi"]["m"], 2.0);
    assert!(v["spi_multi"].is_number());

    let out = run(&["spi-test", "--bsr", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_tables_have_documented_columns() {
    let dir = TempDir::new().unwrap();
    ok(&["figures", "spi-posterior", "frontier", "--reference-bsrs", "0.1,0.3,0.2", "--out-dir", s(dir.path())]);
    let spi = std::fs::read_to_string(dir.path().join("spi-posterior.csv")).unwrap();
    assert_eq!(spi.lines().next(), Some("r,pdf"));
    assert_eq!(spi.lines().count(), 402);
    let frontier = std::fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
    let lines: Vec<&str> = frontier.lines().collect();
    assert_eq!(lines[0], "rho,id_estimated,id_closed_form");
    assert_eq!(lines.len(), 10);
    let row: Vec<f64> = lines[5].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 0.5);
    assert!((row[2] - 4.8188).abs() < 1e-4);
    assert!((row[1] - row[2]).abs() / row[2] < 0.15);

    let out = run(&["figures", "frontier", "convergence"]);
    assert_eq!(out.status.code(), Some(2));
}
