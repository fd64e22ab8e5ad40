use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> (Value, Vec<Value>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap());
    let header = lines.next().expect("header line");
    (header, lines.collect())
}

fn without_times(out: &Output) -> Vec<Value> {
    let (_, mut recs) = records(out);
    for r in &mut recs {
        r.as_object_mut().unwrap().remove("wallTimeMs");
    }
    recs
}

#[test]
fn wronskian_passes() {
    let out = qseries(&[
        "verify",
        "--type",
        "A",
        "--rank",
        "2",
        "--identity",
        "wronskian",
        "--degree",
        "6",
    ]);
    assert!(out.status.success());
    let (header, recs) = records(&out);
    assert_eq!(header["schemaVersion"], 1);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["status"], "pass");
    assert_eq!(recs[0]["degreeChecked"], 6);
}

#[test]
fn rank_two_type_b_all_pairs() {
    let out = qseries(&[
        "verify",
        "--type",
        "B",
        "--rank",
        "2",
        "--identity",
        "bn-conj",
        "--all-pairs",
        "--degree",
        "6",
    ]);
    assert!(out.status.success());
    let (_, recs) = records(&out);
    assert_eq!(recs.len(), 36);
    assert!(recs.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn missing_spin_series_is_skipped() {
    let out = qseries(&[
        "verify",
        "--type",
        "C",
        "--rank",
        "3",
        "--identity",
        "cn-conj",
        "--degree",
        "3",
    ]);
    assert!(out.status.success());
    let (_, recs) = records(&out);
    assert!(!recs.is_empty());
    for r in &recs {
        assert_eq!(r["status"], "skipped");
        assert_eq!(r["note"], "no R-series provider for C3");
    }
}

#[test]
fn spin_relations_are_conditional() {
    let out = qseries(&[
        "verify",
        "--type",
        "C",
        "--rank",
        "2",
        "--identity",
        "cn-conj",
        "--degree",
        "2",
    ]);
    assert!(out.status.success());
    let (_, recs) = records(&out);
    assert!(recs
        .iter()
        .all(|r| r["status"] == "conditional-pass" && r["note"].is_string()));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let base = [
        "verify",
        "--type",
        "D",
        "--rank",
        "4",
        "--identity",
        "all",
        "--degree",
        "2",
        "--sample",
        "6",
        "--seed",
        "9",
    ];
    let one = qseries(&[&base[..], &["--jobs", "1"]].concat());
    let four = qseries(&[&base[..], &["--jobs", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(without_times(&one), without_times(&four));
}

#[test]
fn modp_mode_is_recorded() {
    let out = qseries(&[
        "verify",
        "--type",
        "C",
        "--rank",
        "3",
        "--identity",
        "ch-c3",
        "--mode",
        "modp",
        "--trials",
        "2",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let (header, recs) = records(&out);
    assert_eq!(header["mode"], "modp(trials=2,seed=5)");
    assert!(recs.iter().all(|r| r["mode"] == "modp(trials=2,seed=5)"));
}

#[test]
fn unknown_identity_is_an_error() {
    let out = qseries(&[
        "verify",
        "--type",
        "A",
        "--rank",
        "2",
        "--identity",
        "bn-conj",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not defined for type A"));
    let out = qseries(&["verify", "--type", "D", "--rank", "2"]);
    assert!(!out.status.success());
}

#[test]
fn dump_examples() {
    let out = qseries(&["verify", "--dump", "q:B2:1b"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.ends_with("+1 Y[1,3]^-1\n"));

    let d0 = String::from_utf8(qseries(&["verify", "--dump", "q:A2:1", "--degree", "0"]).stdout)
        .unwrap();
    let d1 = String::from_utf8(qseries(&["verify", "--dump", "q:A2:1", "--degree", "1"]).stdout)
        .unwrap();
    assert_eq!(d0.lines().skip(1).collect::<Vec<_>>(), vec!["+1 Y[1,0]"]);
    let terms1: Vec<&str> = d1.lines().skip(1).collect();
    assert!(terms1.contains(&"+1 Y[1,0]"));
    assert!(terms1.len() > 1);
}

#[test]
fn dump_rejects_bad_selectors() {
    for sel in ["q:Z2:1", "q:B2", "qhat:C2:5", "nope:B2:1"] {
        assert!(
            !qseries(&["verify", "--dump", sel]).status.success(),
            "{sel}"
        );
    }
}

#[test]
fn regenerated_fixtures_match_the_stored_ones() {
    let dir = std::env::temp_dir().join(format!("qseries-fixtures-{}", std::process::id()));
    let out = qseries(&["verify", "--regen-fixtures", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let stored = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let fresh = std::fs::read(&path).unwrap();
        let kept = std::fs::read(stored.join(path.file_name().unwrap())).unwrap();
        assert_eq!(fresh, kept, "{}", path.display());
        count += 1;
    }
    assert_eq!(count, std::fs::read_dir(&stored).unwrap().count());
    std::fs::remove_dir_all(&dir).unwrap();
}
