//! End-to-end behaviour of the binary: exit codes, file outputs,
//! delegation to the library, and help coverage.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridatlas"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_code(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Builds a small synthetic table on disk and returns its paths.
fn fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let landscape = dir.join("landscape.json");
    std::fs::write(
        &landscape,
        r#"{
            "space": {"hyperparams": [
                {"name": "kernel", "domain": [16, 64, 256]},
                {"name": "filters", "domain": [8, 32]}
            ]},
            "benchmarks": 2,
            "noise": 0.4,
            "seed": 11
        }"#,
    )
    .unwrap();
    let results = dir.join("results.csv");
    let space = dir.join("space.json");
    let output = run(&[
        "synth",
        "--landscape",
        landscape.to_str().unwrap(),
        "--results-out",
        results.to_str().unwrap(),
        "--space-out",
        space.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    (results, space)
}

#[test]
fn help_is_available_for_every_subcommand() {
    for sub in [
        "validate",
        "summarize",
        "fivenum",
        "percentile",
        "correlate",
        "influence",
        "order",
        "defaults",
        "loo",
        "window",
        "resample",
        "filter",
        "split",
        "synth",
    ] {
        let output = run(&[sub, "--help"]);
        assert_code(&output, 0);
        assert!(!output.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    let output = run(&["no-such-command"]);
    assert_code(&output, 2);

    let output = run(&["summarize", "--results"]);
    assert_code(&output, 2);

    // CSV signal input without a rate.
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("sig.csv");
    std::fs::write(&sig, "0.0\n0.0\n").unwrap();
    let out = dir.path().join("out.csv");
    let output = run(&[
        "filter",
        "--input",
        sig.to_str().unwrap(),
        "--cutoff",
        "100",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_code(&output, 2);

    // Bad split fraction.
    let output = run(&[
        "split",
        "--input",
        sig.to_str().unwrap(),
        "--train-fraction",
        "1.5",
        "--seed",
        "1",
        "--train-out",
        out.to_str().unwrap(),
        "--test-out",
        out.to_str().unwrap(),
    ]);
    assert_code(&output, 2);
}

#[test]
fn domain_errors_exit_one_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    std::fs::write(
        &space,
        r#"{"hyperparams": [{"name": "a", "domain": [1, 2]}]}"#,
    )
    .unwrap();
    let results = dir.path().join("results.csv");
    std::fs::write(&results, "a,dataset,accuracy\n1,d0,0.5\n2,d0,1.7\n").unwrap();

    let output = run(&[
        "validate",
        "--results",
        results.to_str().unwrap(),
        "--space",
        space.to_str().unwrap(),
    ]);
    assert_code(&output, 1);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains(":3:"),
        "stderr should name line 3: {stderr}"
    );
}

#[test]
fn summarize_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let (results, space) = fixture(dir.path());

    let output = run(&[
        "summarize",
        "--results",
        results.to_str().unwrap(),
        "--space",
        space.to_str().unwrap(),
        "--dataset",
        "b0",
        "--by",
        "kernel",
    ]);
    assert_code(&output, 0);

    let space_loaded = gridatlas::HyperparamSpace::from_json_file(&space).unwrap();
    let table = gridatlas::ResultsTable::load(&results, &space_loaded).unwrap();
    let means = gridatlas::stats::value_mean_accuracy(&table, "b0", "kernel").unwrap();

    let stdout = String::from_utf8_lossy(&output.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("value,mean_accuracy"));
    for ((value, mean), line) in means.iter().zip(lines) {
        assert_eq!(line, format!("{value},{mean}"));
    }
}

#[test]
fn defaults_csv_matches_a_library_run() {
    let dir = tempfile::tempdir().unwrap();
    let (results, space) = fixture(dir.path());
    let out = dir.path().join("defaults.csv");

    let output = run(&[
        "defaults",
        "--results",
        results.to_str().unwrap(),
        "--space",
        space.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_code(&output, 0);

    let space_loaded = gridatlas::HyperparamSpace::from_json_file(&space).unwrap();
    let table = gridatlas::ResultsTable::load(&results, &space_loaded).unwrap();
    let percentiles = gridatlas::stats::PercentileTable::from_table(&table).unwrap();
    let sequence = gridatlas::defaults::greedy_defaults(&percentiles, 25).unwrap();

    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), sequence.len());
    for (row, &config_index) in rows.iter().zip(&sequence.config_indices) {
        let config = space_loaded.config_at(config_index);
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[1], config.values[0].to_string());
        assert_eq!(cells[2], config.values[1].to_string());
    }
}

#[test]
fn filter_preserves_a_dc_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("dc.csv");
    let mut contents = String::new();
    for _ in 0..20_000 {
        contents.push_str("0.25\n");
    }
    std::fs::write(&sig, contents).unwrap();
    let out = dir.path().join("filtered.csv");

    let output = run(&[
        "filter",
        "--input",
        sig.to_str().unwrap(),
        "--rate",
        "48000",
        "--cutoff",
        "46",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_code(&output, 0);

    let filtered = gridatlas::signal::io::read_signal_csv(&out, 48_000.0).unwrap();
    assert_eq!(filtered.len(), 20_000);
    for &s in filtered.samples() {
        assert!((s - 0.25).abs() < 1e-6);
    }
}

#[test]
fn window_then_split_stratifies() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("sig.csv");
    let mut contents = String::new();
    for i in 0..1024 {
        contents.push_str(&format!("{}\n", i as f64 / 1024.0));
    }
    std::fs::write(&sig, contents).unwrap();

    let windows = dir.path().join("win.csv");
    let output = run(&[
        "window",
        "--input",
        sig.to_str().unwrap(),
        "--rate",
        "1000",
        "--length",
        "64",
        "--label",
        "healthy",
        "--output",
        windows.to_str().unwrap(),
    ]);
    assert_code(&output, 0);

    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let output = run(&[
        "split",
        "--input",
        windows.to_str().unwrap(),
        "--train-fraction",
        "0.25",
        "--seed",
        "9",
        "--train-out",
        train.to_str().unwrap(),
        "--test-out",
        test.to_str().unwrap(),
    ]);
    assert_code(&output, 0);

    let train_set = gridatlas::signal::io::read_windows_csv(&train, 1000.0).unwrap();
    let test_set = gridatlas::signal::io::read_windows_csv(&test, 1000.0).unwrap();
    // 1024 / 64 = 16 windows, floor(0.25 * 16) = 4 to train.
    assert_eq!(train_set.len(), 4);
    assert_eq!(test_set.len(), 12);
}

#[test]
fn outputs_are_written_atomically_with_no_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let (results, space) = fixture(dir.path());
    let out = dir.path().join("report.csv");
    let output = run(&[
        "validate",
        "--results",
        results.to_str().unwrap(),
        "--space",
        space.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    assert!(out.exists());

    // Only the declared artifacts remain in the directory.
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec!["landscape.json", "report.csv", "results.csv", "space.json"]
    );
}

#[test]
fn correlate_handles_value_and_rank_methods() {
    let dir = tempfile::tempdir().unwrap();
    let (results, space) = fixture(dir.path());
    for method in ["pearson", "spearman"] {
        let output = run(&[
            "correlate",
            "--space",
            space.to_str().unwrap(),
            "--dataset",
            "b0",
            "--method",
            method,
            results.to_str().unwrap(),
            results.to_str().unwrap(),
        ]);
        assert_code(&output, 0);
        let stdout = String::from_utf8_lossy(&output.stdout);
        // First data row: label, diagonal (exactly 1), cross entry.
        let cells: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(cells[cells.len() - 2], "1", "diagonal entry: {stdout}");
        let cross: f64 = cells[cells.len() - 1].parse().unwrap();
        assert!((cross - 1.0).abs() < 1e-9, "cross entry: {cross}");
    }
}
