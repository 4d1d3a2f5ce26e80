use std::process::Command;

use neckflow_harness::output::sha256_hex;
use neckflow_harness::{load_config, ConfigError, Scenario};

fn neckflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neckflow"))
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# spectrum run\nscenario = spectrum\nn = 3\nk = 2\ngrid_points = 500\n",
    )
    .unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.scenario, Scenario::SpectrumValidate);
    assert_eq!(cfg.cylinder, Some((3, 2)));
    assert_eq!(cfg.grid_points, 500);
    assert!(matches!(
        load_config(&dir.path().join("missing.cfg")),
        Err(ConfigError::Io { .. })
    ));
}

#[test]
fn manifest_lists_every_file_with_its_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let status = neckflow()
        .args([
            "spectrum-validate",
            "--n",
            "2",
            "--k",
            "1",
            "--grid-points",
            "1000",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["grid_points"], "1000");
    let files = manifest["files"].as_array().unwrap();
    let mut listed: Vec<String> = files
        .iter()
        .map(|f| f["file"].as_str().unwrap().to_string())
        .collect();
    for f in files {
        let bytes = std::fs::read(dir.path().join(f["file"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
    let mut on_disk: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    listed.sort();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    let eigen = std::fs::read_to_string(dir.path().join("eigen_table.csv")).unwrap();
    assert!(eigen.starts_with("i,j,eigenvalue,multiplicity\n"));
    assert!(eigen.contains("\n0,0,-1.0000000000000000e0,1\n"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "scenario = spectrum\nn = 2\nk = 1\ngrid_points = 400\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = neckflow()
        .arg("--config")
        .arg(&path)
        .args(["--n", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success());
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"n\": \"3\""));
    assert!(manifest.contains("\"grid_points\": \"400\""));
}

#[test]
fn exit_codes_follow_the_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let bad = neckflow()
        .args(["spectrum", "--n", "3", "--k", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`k`"));
    let unknown = neckflow()
        .args(["frequency", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    // the bowl tail exponent check fails, so the run reports a failed check
    let bowl = neckflow()
        .args(["bowl-ode", "--out"])
        .arg(dir.path().join("bowl"))
        .output()
        .unwrap();
    assert_eq!(bowl.status.code(), Some(1));
    let surgery = neckflow()
        .args(["surgery-table", "--out"])
        .arg(dir.path().join("s"))
        .output()
        .unwrap();
    assert_eq!(surgery.status.code(), Some(0));
    // a cylinder with k >= 2 has no inverted-cusp restart
    let cusp = neckflow()
        .args(["cusp-restart", "--n", "4", "--k", "2", "--out"])
        .arg(dir.path().join("c"))
        .output()
        .unwrap();
    assert_eq!(cusp.status.code(), Some(3));
}
