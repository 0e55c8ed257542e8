use std::path::Path;
use std::process::Command;

fn scottlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scottlab"))
}

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

#[test]
fn golden_reference_outputs() {
    let out = tempfile::tempdir().unwrap();
    for (cmd, file) in [("assemble", "breakdown.json"), ("bounds", "bounds.json")] {
        let status = scottlab()
            .args(["--config"])
            .arg(data("data/reference.toml"))
            .arg("--out-dir")
            .arg(out.path())
            .arg(cmd)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "{cmd}");
        let got = std::fs::read_to_string(out.path().join(file)).unwrap();
        let want = std::fs::read_to_string(data("golden").join(file)).unwrap();
        assert_eq!(got, want, "{file} differs from the golden copy");
    }
}

#[test]
fn validation_failure_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "Z = [100.0]\nN = 100.0\nbeta = 0.0064\n").unwrap();
    let status = scottlab().arg("--config").arg(&cfg).arg("--out-dir").arg(dir.path()).arg("validate").status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(dir.path().join("validation.json").exists());
}

#[test]
fn missing_config_is_reported() {
    let status = scottlab().arg("bounds").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn phase_space_table() {
    let dir = tempfile::tempdir().unwrap();
    let status = scottlab()
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["phase-space", "--law", "rel", "--gamma", "0.1", "--points", "5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("phase_space.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("w,density,pressure"));
}

#[test]
fn tf_and_small_sgf_runs() {
    let dir = tempfile::tempdir().unwrap();
    let status = scottlab().arg("--out-dir").arg(dir.path()).args(["tf", "--z", "2"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let tf: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tf.json")).unwrap()).unwrap();
    assert!((tf["electrons"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let status = scottlab()
        .arg("--out-dir")
        .arg(dir.path())
        .args(["--seed", "1", "sgf", "--lattice", "4", "--start-energy", "0.2"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let log = std::fs::read_to_string(dir.path().join("sgf_log.csv")).unwrap();
    assert!(log.starts_with("step,E,residual,field_energy"));
    let field = std::fs::read_to_string(dir.path().join("sgf_field.csv")).unwrap();
    assert_eq!(field.lines().count(), 1 + 64);
}
