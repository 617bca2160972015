//! End-to-end tests of the `bcfp` binary: clean → run → report →
//! dump-keys on a small synthetic dataset, plus exit-code contracts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bcfp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcfp"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bcfp-cli-test-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_small_dataset(path: &Path) {
    // enough rows of each class for a 2-seed 50/50 holdout, including a
    // duplicate spelling and one broken SMILES
    let rows = [
        ("CCO", 1),
        ("OCC", 1),  // duplicate of CCO
        ("C1CC", 0), // invalid: unclosed ring
        ("CCN", 1),
        ("CCC", 0),
        ("CCCC", 0),
        ("CCOC", 1),
        ("CC(C)O", 1),
        ("CC(C)N", 1),
        ("c1ccccc1", 0),
        ("Cc1ccccc1", 0),
        ("CCc1ccccc1", 0),
        ("OCc1ccccc1", 1),
        ("NCc1ccccc1", 1),
        ("CC(=O)O", 0),
        ("CC(=O)N", 0),
        ("CCS", 0),
        ("CCF", 0),
    ];
    let mut text = String::from("smiles,p_np\n");
    for (smiles, label) in rows {
        text.push_str(&format!("{smiles},{label}\n"));
    }
    fs::write(path, text).unwrap();
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn clean_run_report_pipeline() {
    let dir = tmp_dir("pipeline");
    let raw = dir.join("raw.csv");
    write_small_dataset(&raw);

    // clean
    let out = run_ok(
        bcfp()
            .arg("clean")
            .arg("--dataset")
            .arg(&raw)
            .arg("--out")
            .arg(&dir),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("input rows:      18"));
    assert!(stdout.contains("invalid smiles:  1"));
    assert!(stdout.contains("duplicates:      1"));
    assert!(stdout.contains("kept:            16"));
    let report = fs::read_to_string(dir.join("clean_report.csv")).unwrap();
    assert!(report.starts_with("row_id,reason\n"));
    assert!(report.contains("duplicate of row 0"));

    // run a small grid
    let config_path = dir.join("exp.toml");
    fs::write(
        &config_path,
        format!(
            r#"
[dataset]
path = "{}"

[grid]
schemes = ["ecfp", "concat"]
radii = [0, 1]
pooling = "folded"
fold_dim = 64

[split]
kind = "holdout"
test_fraction = 0.5
seeds = 2

[forest]
n_trees = 8

[output]
dir = "{}"
"#,
            dir.join("clean.csv").display(),
            dir.join("run").display()
        ),
    )
    .unwrap();
    let out = run_ok(
        bcfp()
            .arg("run")
            .arg("--config")
            .arg(&config_path)
            .arg("--jobs")
            .arg("2"),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("4 configurations x 2 splits"));
    let records = fs::read_to_string(dir.join("run/records.csv")).unwrap();
    assert!(records.starts_with("config,split,auroc,auprc,f1\n"));
    assert_eq!(records.lines().count(), 1 + 8);
    assert!(dir.join("run/manifest.json").exists());

    // idempotent resume: byte-identical records
    let out2 = run_ok(bcfp().arg("run").arg("--config").arg(&config_path));
    assert!(String::from_utf8_lossy(&out2.stdout).contains("0 jobs pending"));
    let records2 = fs::read_to_string(dir.join("run/records.csv")).unwrap();
    assert_eq!(records, records2);

    // end-to-end determinism: a fresh run of the same config and inputs
    // produces a byte-identical records file
    run_ok(
        bcfp()
            .arg("run")
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(dir.join("run_again")),
    );
    let records3 = fs::read_to_string(dir.join("run_again/records.csv")).unwrap();
    assert_eq!(records, records3);

    // report
    let out = run_ok(
        bcfp()
            .arg("report")
            .arg("--records")
            .arg(dir.join("run/records.csv"))
            .arg("--out")
            .arg(dir.join("report")),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("config"));
    assert!(stdout.contains('±'));
    for name in [
        "tukey_auroc.csv",
        "tukey_auprc.csv",
        "tukey_f1.csv",
        "box_auroc.svg",
        "box_auprc.svg",
        "box_f1.svg",
    ] {
        assert!(dir.join("report").join(name).exists(), "missing {name}");
    }
    let svg = fs::read_to_string(dir.join("report/box_auroc.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<rect").count(), 4); // one box per config
}

#[test]
fn dump_keys_emits_json_lines() {
    let dir = tmp_dir("dump");
    let raw = dir.join("raw.csv");
    fs::write(&raw, "smiles,label\nCCO,1\nO=C=O,0\n").unwrap();

    let out = run_ok(
        bcfp()
            .arg("dump-keys")
            .arg("--dataset")
            .arg(&raw)
            .arg("--scheme")
            .arg("bcfp")
            .arg("--radius")
            .arg("0"),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["smiles"], "CCO");
    assert_eq!(first["scheme"], "bcfp");
    assert_eq!(first["radius"], 0);
    assert_eq!(first["keys"].as_array().unwrap().len(), 2);
    // carbon dioxide: both bonds share one key with count 2
    let second: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    let keys = second["keys"].as_array().unwrap();
    assert_eq!(keys.len(), 1);
    assert_eq!(keys[0]["count"], 2);
}

#[test]
fn exit_codes() {
    // usage error -> 1
    let out = bcfp().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bcfp().output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // data error -> 2
    let out = bcfp()
        .arg("clean")
        .arg("--dataset")
        .arg("/nonexistent/file.csv")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // bad label values -> 2
    let dir = tmp_dir("exit");
    let bad = dir.join("bad.csv");
    fs::write(&bad, "smiles,p_np\nCCO,maybe\n").unwrap();
    let out = bcfp()
        .arg("clean")
        .arg("--dataset")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // empty survivors -> 2
    let empty = dir.join("empty.csv");
    fs::write(&empty, "smiles,p_np\nC1CC,1\n").unwrap();
    let out = bcfp()
        .arg("clean")
        .arg("--dataset")
        .arg(&empty)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // --help -> 0
    let out = bcfp().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    // a single valid row survives cleanup
    let one = dir.join("one.csv");
    fs::write(&one, "smiles,p_np\nCCO,1\n").unwrap();
    let out = bcfp()
        .arg("clean")
        .arg("--dataset")
        .arg(&one)
        .arg("--out")
        .arg(dir.join("one_out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("kept:            1"));
}

#[test]
fn degenerate_split_is_a_data_error() {
    let dir = tmp_dir("degenerate");
    let clean = dir.join("clean.csv");
    fs::write(
        &clean,
        "smiles,label\nCCO,1\nCCN,1\nCCC,0\nCCCC,1\nCCOC,1\nCC(C)O,0\n",
    )
    .unwrap();
    let config_path = dir.join("exp.toml");
    fs::write(
        &config_path,
        format!(
            r#"
[dataset]
path = "{}"

[grid]
schemes = ["ecfp"]
radii = [0]
pooling = "folded"
fold_dim = 16

[split]
kind = "kfold"
k = 3
repeats = 1

[forest]
n_trees = 4

[output]
dir = "{}"
"#,
            clean.display(),
            dir.join("run").display()
        ),
    )
    .unwrap();
    let out = bcfp()
        .arg("run")
        .arg("--config")
        .arg(&config_path)
        .output()
        .unwrap();
    // k=3 with a 2-member class fails split generation -> data error
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_jobs_are_recorded_and_exit_3() {
    let dir = tmp_dir("partial");
    let clean = dir.join("clean.csv");
    let mut text = String::from("smiles,label\n");
    for i in 0..10 {
        text.push_str(&format!("{}O,{}\n", "C".repeat(i + 1), i % 2));
    }
    fs::write(&clean, text).unwrap();
    let config_path = dir.join("exp.toml");
    // slice_k = 0 is rejected at vocabulary-fit time, inside each job:
    // the run completes, failures are recorded, exit code is 3
    fs::write(
        &config_path,
        format!(
            r#"
[dataset]
path = "{}"

[grid]
schemes = ["ecfp"]
radii = [0]
pooling = "sortslice"
slice_k = 0

[split]
kind = "holdout"
test_fraction = 0.5
seeds = 2

[forest]
n_trees = 4

[output]
dir = "{}"
"#,
            clean.display(),
            dir.join("run").display()
        ),
    )
    .unwrap();
    let out = bcfp()
        .arg("run")
        .arg("--config")
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let failures = fs::read_to_string(dir.join("run/failures.csv")).unwrap();
    assert!(failures.starts_with("config,split,error\n"));
    assert_eq!(failures.lines().count(), 1 + 2);
}
