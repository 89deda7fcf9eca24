use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heavytail-ldp"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn flat_corridor_needs_no_jumps() {
    let out = run(&["corridor", "--config", configs().join("flat.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["J"].as_u64(), v["K"].as_u64()), (Some(0), Some(0)));
}

#[test]
fn shipped_corridor_needs_one_of_each() {
    let out = run(&["corridor", "--config", configs().join("corridor.toml").to_str().unwrap()]);
    let v = json(&out);
    assert_eq!((v["J"].as_u64(), v["K"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("multiple_optima.toml");
    let mut reports = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = run(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--samples",
            "3000",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.code() == Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push((
            std::fs::read(out_dir.join("report.json")).unwrap(),
            std::fs::read(out_dir.join("ratios.csv")).unwrap(),
        ));
    }
    assert_eq!(reports[0], reports[1]);
    let csv = String::from_utf8(reports[0].1.clone()).unwrap();
    assert!(csv.starts_with("n,p_hat,p_stderr,normalizer,ratio\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["run"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "scenario = \"corridor\"\nseed = 1\noutput_dir = \"o\"\ncolour = 3\n").unwrap();
    assert_eq!(run(&["corridor", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--config",
        configs().join("corridor.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("corridor/report.json").exists());

    let failing = dir.path().join("failing.toml");
    std::fs::write(
        &failing,
        "scenario = \"ldp_slope\"\nseed = 1\nn_list = [20, 40]\nsamples_per_n = 2000\noutput_dir = \"o\"\n\
         [pos]\nc = 1.0\nalpha = 2.0\n[target]\nlevel = 1.0\n[bands]\nslope_min = 5.0\n",
    )
    .unwrap();
    let out = run(&["verify", "--config", failing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn estimate_c_and_simulate() {
    let out = run(&[
        "estimate-c",
        "--config",
        configs().join("moderate_jumps.toml").to_str().unwrap(),
        "--samples",
        "200000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["j"], 1);
    let est = v["estimate_c"]["value"].as_f64().unwrap();
    let se = v["estimate_c"]["stderr"].as_f64().unwrap();
    assert!((est - 5.0 / 12.0).abs() <= 3.0 * se, "{v}");

    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--config",
        configs().join("ldp_slope.toml").to_str().unwrap(),
        "--samples",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("paths/n25_path1.csv").exists());
    assert!(dir.path().join("paths/n400_jumps0.csv").exists());
    assert!(!dir.path().join("paths/n25_path2.csv").exists());
}
