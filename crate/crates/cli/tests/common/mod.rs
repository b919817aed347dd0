#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn krigkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krigkit"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs a command that must succeed and returns its JSON report.
pub fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = krigkit(dir, args);
    assert!(
        out.status.success(),
        "krigkit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Ten-point 1-d test-function training set.
pub fn onedim_training(dir: &Path, seed: &str) {
    ok(dir, &["lhd", "--n", "10", "--d", "1", "--seed", seed, "--out", "x.csv"]);
    ok(dir, &["simulate", "--simulator", "onedim", "--design", "x.csv", "--out", "train.csv"]);
}
