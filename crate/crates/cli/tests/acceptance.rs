//! CLI acceptance criterion. Runs without the libtest harness so the
//! `PASS`/`FAIL` line always shows in `cargo test` output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quditcorr"));
    c.env_remove("QUDITCORR_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sample_args<'a>(csv: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![
        "sample",
        "--ensemble",
        "lmm-rejection",
        "--d",
        "2",
        "--count",
        "1000",
        "--seed",
        "1",
        "--csv",
        csv,
    ];
    v.extend_from_slice(extra);
    v
}

/// Repeating a command with identical flags gives byte-identical output,
/// whatever the thread count.
fn criterion_13_determinism() {
    let dir = TempDir::new().unwrap();
    let mut pass = true;
    let mut detail = Vec::new();

    let csv: Vec<PathBuf> = (0..3).map(|i| dir.path().join(format!("{i}.csv"))).collect();
    let mut stdout = Vec::new();
    for (i, path) in csv.iter().enumerate() {
        let mut c = bin();
        if i == 2 {
            c.env("QUDITCORR_THREADS", "1");
        }
        let o = c.args(sample_args(s(path), &["--json"])).output().unwrap();
        assert_eq!(code(&o), 0);
        stdout.push(o.stdout);
    }
    let bytes: Vec<Vec<u8>> = csv.iter().map(|p| std::fs::read(p).unwrap()).collect();
    let csv_same = bytes.windows(2).all(|w| w[0] == w[1]);
    // The echoed config names the CSV path, so compare the reports sans config.
    let strip = |b: &[u8]| {
        let mut v: Value = serde_json::from_slice(b).unwrap();
        v["config"]["csv"] = Value::Null;
        v
    };
    let json_same = stdout.windows(2).all(|w| strip(&w[0]) == strip(&w[1]));
    pass &= csv_same && json_same;
    detail.push(format!("sample csv identical={csv_same} report identical={json_same}"));

    let commands: [&[&str]; 4] = [
        &["discord", "--family", "aa", "--d", "3", "--t", "0.7", "--haar", "--seed", "5", "--json"],
        &["basis", "--d", "3", "--json"],
        &["family", "--family", "a", "--d", "3", "--t", "0.2", "--haar", "--seed", "9", "--json"],
        &["discord", "--family", "a", "--d", "2", "--t", "0.3", "--measure", "d2", "--seed", "1"],
    ];
    for args in commands {
        let a = run(args).stdout;
        let b = bin().env("QUDITCORR_THREADS", "1").args(args).output().unwrap().stdout;
        let same = a == b && !a.is_empty();
        pass &= same;
        detail.push(format!("{} identical={same}", args[0]));
    }
    println!(
        "{} criterion 13 (determinism): {}",
        if pass { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    assert!(pass);
}

fn main() {
    if std::panic::catch_unwind(criterion_13_determinism).is_err() {
        std::process::exit(1);
    }
}
