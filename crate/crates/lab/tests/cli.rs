use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_transport-lab"));
    c.env_remove("TRANSPORT_LAB_OUT");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn text(o: &Output) -> (String, String) {
    (String::from_utf8_lossy(&o.stdout).into_owned(), String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn help_lists_every_subcommand_and_flag() {
    let o = bin().arg("--help").output().unwrap();
    assert!(o.status.success());
    let (out, _) = text(&o);
    for word in [
        "conservation",
        "mollify",
        "renorm",
        "stability",
        "solve",
        "validate-config",
        "--config",
        "--out",
        "--set",
        "--quiet",
        "Exit status",
        "TRANSPORT_LAB_OUT",
    ] {
        assert!(out.contains(word), "--help is missing {word}:\n{out}");
    }
}

#[test]
fn every_shipped_config_validates() {
    for entry in std::fs::read_dir(config("")).unwrap() {
        let path = entry.unwrap().path();
        let o = bin().arg("validate-config").arg(&path).output().unwrap();
        let (out, err) = text(&o);
        assert!(o.status.success(), "{}: {err}", path.display());
        assert!(out.contains("[study]"));
    }
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[study]\nname = \"bad\"\n[tolerances]\ndrift = -1.0\n").unwrap();

    let o = bin().arg("validate-config").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).1.contains("tolerances.drift"));
    let o = bin().arg("conservation").arg(&bad).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).1.contains("tolerances.drift"));
    assert!(!dir.path().join("conservation.csv").exists(), "nothing is written for an invalid config");

    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = bin().arg("conservation").output().unwrap();
    assert_eq!(o.status.code(), Some(2), "missing config");

    let o = bin().arg("conservation").arg(dir.path().join("absent.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(2), "unreadable config");

    let o = bin()
        .args(["validate-config", "--set", "grid.n=lots"])
        .arg(config("coarse.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "bad override");
}

#[test]
fn passing_run_exits_0_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zv");
    let o = bin()
        .arg("conservation")
        .arg(config("zero-velocity.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let (stdout, stderr) = text(&o);
    assert_eq!(o.status.code(), Some(0), "{stdout}{stderr}");
    assert!(stdout.contains("PASS"));
    for f in ["conservation.csv", "boundary.csv", "probes.csv", "summary.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["config"]["study"]["name"], "zero-velocity");
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .arg("conservation")
        .arg(config("coarse.toml"))
        .arg("--out")
        .arg(dir.path())
        .arg("--quiet")
        .output()
        .unwrap();
    let (stdout, _) = text(&o);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout.lines().all(|l| l.starts_with("FAIL")), "{stdout}");
}

#[test]
fn output_dir_falls_back_to_env_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("TRANSPORT_LAB_OUT", dir.path())
        .args(["solve", "--set", "grid.n=16", "--set", "time.nt=4", "--set", "study.name=envtest"])
        .arg(config("solve.toml"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", text(&o).1);
    assert!(dir.path().join("envtest").join("field.csv").is_file());
    assert!(dir.path().join("envtest").join("norms.csv").is_file());
}
