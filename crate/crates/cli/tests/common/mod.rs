#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn eegpnn(args: &[&str]) -> Output {
    eegpnn_env(args, &[])
}

pub fn eegpnn_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eegpnn"));
    cmd.args(args).env_remove("EEGPNN_OUT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("failed to launch eegpnn")
}

/// Run and require exit code 0, returning stdout.
pub fn ok(args: &[&str]) -> String {
    let out = eegpnn(args);
    assert!(
        out.status.success(),
        "eegpnn {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small two-class dataset: `subjects` per class, 4 channels, 90 s each.
pub fn small_dataset(dir: &Path, seed: u64, subjects: usize) -> PathBuf {
    let seed = seed.to_string();
    let n = subjects.to_string();
    ok(&[
        "gen",
        "--out",
        s(dir),
        "--seed",
        &seed,
        "--subjects",
        &n,
        "--duration",
        "90",
        "--channels",
        "4",
    ]);
    dir.join("manifest.json")
}
