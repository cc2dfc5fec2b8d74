use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moscolab"))
}

#[test]
fn lists_every_scenario() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in [
        "prop15i",
        "prop16ii",
        "prop18i",
        "remark17",
        "thm42-sweep",
        "const-alpha-sweep",
    ] {
        assert!(text.contains(id), "{text}");
    }
}

#[test]
fn env_var_sets_output_dir_and_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = bin()
            .args(["run", "--scenario", "thm42-sweep"])
            .env("MOSCOLAB_OUT", dir.path().join(sub))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join(sub).join("thm42-sweep.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("scenario,id_param,method,verdict,energy_err,resolvent_err,semigroup_err,notes\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn out_flag_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        "[prop16i]\nn = [1, 2]\nmosco_n = [1, 16, 256]\ngrid_n = 512\nf = [\"gauss\"]\n",
    )
    .unwrap();
    let out = bin()
        .args(["run", "--scenario", "prop16i", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .env("MOSCOLAB_OUT", dir.path().join("ignored"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("prop16i.csv")).unwrap();
    // 3 classification rows, 3 diagnostic rows, 1 diagnostic verdict row
    assert_eq!(csv.lines().count(), 1 + 3 + 3 + 1);
    let summary = std::fs::read_to_string(dir.path().join("prop16i_summary.txt")).unwrap();
    assert!(summary.contains("finite-dimensional proxy"));
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn unreproduced_verdict_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    // the resolvent error is still far above the threshold at n = 4
    std::fs::write(
        &cfg,
        "[prop16i]\nn = [1]\nmosco_n = [1, 4]\ngrid_n = 256\nf = [\"gauss\"]\n",
    )
    .unwrap();
    let out = bin()
        .args(["run", "--scenario", "prop16i", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("MISMATCH"));
    let summary = std::fs::read_to_string(dir.path().join("prop16i_summary.txt")).unwrap();
    assert!(summary.contains("expected ConvergenceObserved, observed Stalled -> MISMATCH"));
}

#[test]
fn bad_config_fails_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[prop16i]\nn = [1, 2]\ngird_n = 5\n").unwrap();
    let out = bin()
        .args(["run", "--scenario", "prop16i", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("gird_n") && err.contains("line 3"), "{err}");
}

#[test]
fn unknown_scenario_is_an_error() {
    let out = bin().args(["run", "--scenario", "prop99"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
