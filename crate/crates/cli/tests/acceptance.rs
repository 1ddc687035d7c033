//! Criterion 9: every experiment rerun with the same seed produces
//! byte-identical CSV output. Exercised through the installed binary at
//! desk-scale parameters (determinism does not depend on grid sizes).

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_switchdyn"))
}

fn run_into(dir: &Path, args: &[&str]) {
    let status = bin()
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .status()
        .expect("spawn switchdyn");
    assert!(status.success(), "switchdyn {args:?} failed: {status}");
}

/// Reads every regular file in a directory into (name, bytes) pairs.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("read out dir") {
        let entry = entry.expect("dir entry");
        let name = entry.file_name().to_string_lossy().into_owned();
        files.insert(name, std::fs::read(entry.path()).expect("read file"));
    }
    files
}

#[test]
fn criterion_9_byte_identical_reruns() {
    let experiments: Vec<(&str, Vec<&str>)> = vec![
        (
            "constant-sweep",
            vec![
                "constant-sweep",
                "--points",
                "6",
                "--events",
                "5000",
                "--seed",
                "11",
            ],
        ),
        (
            "dde-sweep",
            vec![
                "dde-sweep",
                "--points",
                "4",
                "--horizon",
                "40",
                "--burn-in",
                "4",
                "--seed",
                "11",
            ],
        ),
        (
            "dist-sweep",
            vec![
                "dist-sweep",
                "--points",
                "5",
                "--events",
                "4000",
                "--seed",
                "11",
            ],
        ),
        (
            "cv-sweep",
            vec![
                "cv-sweep", "--family", "gamma", "--cvs", "0.01,4", "--points", "5", "--events",
                "4000", "--seed", "11",
            ],
        ),
        (
            "bistable",
            vec![
                "bistable",
                "--points",
                "4",
                "--realizations",
                "8",
                "--horizon",
                "20",
                "--seed",
                "11",
            ],
        ),
    ];

    let root = tempdir("criterion9");
    let mut all_identical = true;
    let mut summary = Vec::new();
    for (name, args) in &experiments {
        let first = root.join(format!("{name}-a"));
        let second = root.join(format!("{name}-b"));
        run_into(&first, args);
        run_into(&second, args);
        let (a, b) = (snapshot(&first), snapshot(&second));
        let identical = a == b;
        all_identical &= identical;
        summary.push(format!(
            "{name}: {} files {}",
            a.len(),
            if identical { "identical" } else { "DIFFER" }
        ));
        assert!(!a.is_empty());
        assert!(a.keys().any(|k| k.ends_with(".csv")), "{name} wrote no CSV");
        assert!(a.contains_key("manifest.txt"), "{name} wrote no manifest");
    }
    println!(
        "[{}] criterion 9 (deterministic reruns): {}",
        if all_identical { "PASS" } else { "FAIL" },
        summary.join("; ")
    );
    assert!(all_identical);
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("switchdyn-{tag}-{}", std::process::id()));
    // Stale outputs from an earlier run of this same process id would
    // defeat the comparison.
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}
