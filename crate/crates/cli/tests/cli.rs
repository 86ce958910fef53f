use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use momentum_core::ingest::write_match_csv;
use momentum_core::synth::{generate, generate_many, SynthConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_momentum"))
}

fn synth(seed: u64, id: &str, points: usize) -> SynthConfig {
    SynthConfig {
        seed,
        match_id: id.into(),
        max_points: Some(points),
        ..SynthConfig::default()
    }
}

fn write_csv(dir: &Path, name: &str, configs: &[SynthConfig]) -> PathBuf {
    let ds = if configs.len() == 1 {
        generate(&configs[0])
    } else {
        generate_many(configs)
    };
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_match_csv(&ds, &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn momentum_writes_series_charts_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "m.csv", &[synth(1, "m1", 120)]);
    let out = dir.path().join("out");
    let o = run(&[
        "momentum",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("momentum_series.csv").exists());
    assert!(out.join("momentum_m1_whole.svg").exists());
    assert!(out.join("momentum_m1_set1.svg").exists());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("momentum_report.json")).unwrap()).unwrap();
    assert_eq!(json["payload"]["kind"], "momentum");
    assert_eq!(json["fingerprint"]["rows_in"], 120);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["momentum", "--bogus"])), 1);
    assert_eq!(
        code(&run(&[
            "momentum",
            "--weights",
            "0.5,0.6,0,0",
            "--input",
            "x.csv"
        ])),
        1
    );
    assert_eq!(
        code(&run(&["randomness", "--cutoff", "2", "--input", "x.csv"])),
        1
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.csv");
    assert_eq!(
        code(&run(&["momentum", "--input", missing.to_str().unwrap()])),
        2
    );

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let o = run(&["momentum", "--input", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));

    let input = write_csv(dir.path(), "m.csv", &[synth(1, "m1", 60)]);
    let o = run(&[
        "momentum",
        "--input",
        input.to_str().unwrap(),
        "--match",
        "nope",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("m1"));
}

#[test]
fn overflowing_feature_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate(&synth(4, "m1", 150));
    let records = ds
        .records()
        .iter()
        .cloned()
        .map(|mut r| {
            r.speed_mph = Some(if r.point_no % 2 == 0 { 1e308 } else { 100.0 });
            r
        })
        .collect();
    let ds = momentum_core::ingest::MatchDataset::from_records(records).unwrap();
    let input = dir.path().join("m.csv");
    let mut buf = Vec::new();
    write_match_csv(&ds, &mut buf).unwrap();
    fs::write(&input, buf).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "randomness",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "m.csv", &[synth(2, "m1", 200)]);
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# study settings\ninput = {}\nout = {}\nformat = json\nthreshold = 101\n",
            input.display(),
            dir.path().join("from_file").display()
        ),
    )
    .unwrap();
    let out = dir.path().join("from_flag");
    let o = run(&[
        "randomness",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("randomness_report.json").exists());
    assert!(!out.join("randomness_coefficients.csv").exists());
    assert!(!dir.path().join("from_file").exists());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("randomness_report.json")).unwrap()).unwrap();
    assert_eq!(json["payload"]["non_random"], false);
}

#[test]
fn swing_needs_test_match_and_reports_empty_key_games() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "m.csv", &[synth(1, "a", 80), synth(2, "b", 80)]);
    let path = input.to_str().unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(&run(&["swing", "--input", path, "--train", "a"])), 1);
    let o = run(&[
        "swing",
        "--input",
        path,
        "--train",
        "a",
        "--test",
        "b",
        "--key-rule",
        "none",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--key-rule"));
}

#[test]
fn factors_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "m.csv", &[synth(6, "m1", 300)]);
    let out = dir.path().join("out");
    let o = run(&[
        "factors",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("factors_spearman_rho.csv").exists());
    assert!(out.join("factors_factors.csv").exists());
}
