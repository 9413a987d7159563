use std::path::Path;
use std::process::{Command, Output};

use qseal::runner::{load_report, Format};

fn qseal(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qseal"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn table1_prints_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = qseal(&["table1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for label in [
        "scales linearly with n",
        "may scale sublinearly",
        "can be finite in the worst case",
    ] {
        assert!(text.contains(label), "{text}");
    }
    let csv = qseal(&["table1", "--format", "csv"], dir.path());
    assert_eq!(stdout(&csv).lines().count(), 10);
}

#[test]
fn sweep_json_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "config_version = 1\n[scheme]\nkind = \"fixed_angle\"\n[sweep]\nn = [100, 1000, 10000]\n[output]\nformat = \"json\"\npath = \"out.json\"\n",
    );
    for _ in 0..2 {
        assert_eq!(
            qseal(&["sweep", "--config", &cfg], dir.path())
                .status
                .code(),
            Some(0)
        );
    }
    let rows = load_report(&dir.path().join("out.json"), Format::Json).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.k_star == 7 && r.verdict == "C"));

    let a = qseal(
        &[
            "sweep", "--config", &cfg, "--format", "csv", "--out", "a.csv",
        ],
        dir.path(),
    );
    let b = qseal(
        &[
            "sweep", "--config", &cfg, "--format", "csv", "--out", "b.csv",
        ],
        dir.path(),
    );
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn encode_attack_classify() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.toml",
        "[scheme]\nkind = \"tilted\"\n[sweep]\nn = [100, 1000, 10000]\n",
    );
    let enc = qseal(
        &["encode", "--config", &cfg, "--n", "4", "--message", "0110"],
        dir.path(),
    );
    assert_eq!(enc.status.code(), Some(0));
    assert_eq!(stdout(&enc).lines().count(), 5);

    let att = qseal(
        &[
            "attack", "--config", &cfg, "--n", "10000", "--format", "json",
        ],
        dir.path(),
    );
    assert_eq!(att.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&att.stdout).unwrap();
    assert!(v["detection"]["joint_success_escape"].as_f64().unwrap() >= 0.25);
    assert!(v["outcomes"].is_null());

    let cls = qseal(
        &["classify", "--config", &cfg, "--format", "json"],
        dir.path(),
    );
    assert_eq!(cls.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&cls.stdout).unwrap();
    assert_eq!(v["criterion"], "B");
}

#[test]
fn oracle_check_passes_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = qseal(&["oracle-check", "--seed", "11"], dir.path());
    let b = qseal(&["oracle-check", "--seed", "11"], dir.path());
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed 11"));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        "[scheme]\nkind = \"tilted\"\ntheta_cap = 1.0\n",
    );
    let o = qseal(&["sweep", "--config", &bad], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta_cap must be < π/4"));

    let unknown = write(
        dir.path(),
        "u.toml",
        "[scheme]\nkind = \"tilted\"\nbogus = 3\n",
    );
    assert_eq!(
        qseal(&["sweep", "--config", &unknown], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(qseal(&["sweep"], dir.path()).status.code(), Some(1));
}

#[test]
fn incomplete_decode_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "l.csv",
        "row,col,re,im\n0,0,1,0\n1,1,1,0\n0,2,0,0\n",
    );
    let cfg = write(
        dir.path(),
        "m.toml",
        "[scheme]\nkind = \"matrix\"\nlambda_file = \"l.csv\"\n[strategy]\nkind = \"projective\"\n",
    );
    let o = qseal(&["attack", "--config", &cfg], dir.path());
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
