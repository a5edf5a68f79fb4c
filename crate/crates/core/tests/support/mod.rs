#![allow(dead_code)]

pub mod table;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Runs the binary with a multi-threaded pool so client training really runs in parallel.
pub fn fedtl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedtl"))
        .args(args)
        .env("RAYON_NUM_THREADS", "4")
        .output()
        .expect("binary runs")
}

/// Every file below `root`, keyed by relative path.
pub fn snapshot(root: &Path) -> Snapshot {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).expect("readable dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).expect("below root").to_path_buf();
                out.insert(rel, fs::read(&path).expect("readable file"));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

pub type Snapshot = BTreeMap<PathBuf, Vec<u8>>;

/// Runs `args` twice into `out`, clearing it in between, and returns both snapshots.
pub fn run_twice(args: &[&str], out: &Path) -> (Output, Snapshot, Snapshot) {
    let first = fedtl(args);
    let a = snapshot(out);
    fs::remove_dir_all(out).expect("clear output");
    let second = fedtl(args);
    assert_eq!(first.status.code(), second.status.code());
    (first, a, snapshot(out))
}
