use std::fs;
use std::process::Command;

use qwick::cli::validate_report;

fn qwick() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwick"))
}

#[test]
fn exact_run_writes_valid_reports() {
    let dir = tempfile::tempdir().unwrap();
    let status = qwick().args(["--mode", "exact", "--max-n", "2", "--max-k", "2", "--out"]).arg(dir.path()).status().unwrap();
    assert!(status.success());
    let mut suites = Vec::new();
    for entry in fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let report = validate_report(&fs::read_to_string(&path).unwrap()).unwrap();
            assert!(report.passed(), "{}", report.suite);
            suites.push(report.suite);
        }
    }
    suites.sort();
    assert_eq!(suites, ["combinatorial", "identities", "permutation-lemma"]);
}

#[test]
fn reports_are_reproducible() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let status = qwick()
            .args(["--mode", "float", "--suite", "haagerup", "--seed", "5", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        fs::read_to_string(dir.path().join("haagerup.json")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn bad_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let status = qwick().args(["--mode", "exact", "--suite", "norms", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = qwick().args(["--mode", "float", "--q", "1.5", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
