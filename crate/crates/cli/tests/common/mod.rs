#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn zenopure(args: &[&str]) -> Output {
    zenopure_with_env(args, &[])
}

pub fn zenopure_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zenopure"));
    cmd.args(args).env_remove("ZENOPURE_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run zenopure")
}

/// Runs `command --config fixtures/<config>` plus extra arguments.
pub fn run_fixture(command: &str, config: &str, extra: &[&str]) -> Output {
    let path = fixture(config);
    let mut args = vec![command, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    zenopure(&args)
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// Data rows of the first table in `text`, header dropped.
pub fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

pub fn column(text: &str, index: usize) -> Vec<f64> {
    rows(text).iter().map(|r| r[index].parse().unwrap()).collect()
}

/// Value of a `quantity,value` row.
pub fn quantity(text: &str, name: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no row {name}"))
        .to_owned()
}
