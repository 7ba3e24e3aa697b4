use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn brickfly(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brickfly"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn sysid_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = brickfly(&["sysid", "--out", "x"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&dir.path().join("x/bode.csv")), "omega,mag_db");
    assert_eq!(header(&dir.path().join("x/spectral.csv")), "omega_in,omega_out");
    let report = fs::read_to_string(dir.path().join("x/identified_model.toml")).unwrap();
    assert!(report.contains("axis = \"x\""));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("K = 1.1600"), "{stdout}");
    assert!(stdout.contains("tau = 0.7500"), "{stdout}");
}

#[test]
fn sysid_z_axis() {
    let dir = tempfile::tempdir().unwrap();
    let out = brickfly(&["sysid", "--axis", "z", "--out", "z"], dir.path());
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("K = 0.9800"), "{stdout}");
    assert!(stdout.contains("tau = 0.3000"), "{stdout}");
}

#[test]
fn narrow_sweep_fails_identification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "narrow.toml",
        "[sweep]\nomega_low = 0.4\nomega_high = 0.6\npoints = 5\n",
    );
    let out = brickfly(&["--config", cfg.to_str().unwrap(), "sysid", "--out", "n"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("-3 dB"));
}

#[test]
fn validate_against_own_plant() {
    let dir = tempfile::tempdir().unwrap();
    let out = brickfly(&["validate", "--out", "v"], dir.path());
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("v/mapd.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "amplitude,mapd_percent");
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        let mapd: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(mapd < 1.0);
    }
}

#[test]
fn validate_identified_overshoot_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.toml",
        "[plant]\nkind = \"overshoot\"\n[validate]\nmodel_file = \"o/identified_model.toml\"\n",
    );
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&brickfly(&["--config", cfg, "sysid", "--out", "o"], dir.path())), 0);
    let out = brickfly(&["--config", cfg, "validate", "--out", "o"], dir.path());
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("o/mapd.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().cloned().fold(0.0, f64::max);
    assert!(mean > 0.0 && max > mean);
}

#[test]
fn validate_config_and_metric_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_config(dir.path(), "m.toml", "[validate]\nmodel_file = \"absent.toml\"\n");
    let out = brickfly(&["--config", missing.to_str().unwrap(), "validate"], dir.path());
    assert_eq!(code(&out), 2);
    let zero = write_config(dir.path(), "z.toml", "[validate]\namplitudes = [0.0]\n");
    let out = brickfly(&["--config", zero.to_str().unwrap(), "validate", "--out", "z"], dir.path());
    assert_eq!(code(&out), 4);
}

#[test]
fn navigate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = brickfly(&["navigate", "--out", "calm"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        header(&dir.path().join("calm/trajectory.csv")),
        "t,x,y,z,vx,vy,vz,ux,uy,uz,wind_x,wind_y,wind_z,phase"
    );

    let windy = write_config(dir.path(), "w.toml", "[wind]\nenabled = true\n");
    let out = brickfly(
        &["--config", windy.to_str().unwrap(), "navigate", "--controller", "pd", "--out", "pd"],
        dir.path(),
    );
    assert_eq!(code(&out), 5);

    let bad = write_config(dir.path(), "b.toml", "[mission]\ntimeout = 4.0\n");
    let out = brickfly(&["--config", bad.to_str().unwrap(), "navigate"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn compare_reports_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let windy = write_config(dir.path(), "w.toml", "[wind]\nenabled = true\n");
    let out = brickfly(&["--config", windy.to_str().unwrap(), "compare", "--out", "c"], dir.path());
    assert_eq!(code(&out), 0);
    let summary = fs::read_to_string(dir.path().join("c/comparison_summary.txt")).unwrap();
    assert!(summary.contains("verdict: SMC held the band; PD did not"), "{summary}");
    let csv = fs::read_to_string(dir.path().join("c/comparison.csv")).unwrap();
    assert!(csv.starts_with("controller,success,settle_time,land_time,"));
    assert!(csv.contains("\nsmc,true,"));
    assert!(csv.contains("\npd,false,"));

    let out = brickfly(&["compare", "--out", "calm"], dir.path());
    assert_eq!(code(&out), 0);
    let summary = fs::read_to_string(dir.path().join("calm/comparison_summary.txt")).unwrap();
    assert!(summary.contains("both controllers held the band"));
}

#[test]
fn parallel_sweep_matches_serial() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&brickfly(&["sysid", "--out", "a"], dir.path())), 0);
    assert_eq!(code(&brickfly(&["sysid", "--jobs", "4", "--out", "b"], dir.path())), 0);
    for file in ["bode.csv", "spectral.csv", "identified_model.toml"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn seed_flag_changes_wind() {
    let dir = tempfile::tempdir().unwrap();
    let windy = write_config(dir.path(), "w.toml", "[wind]\nenabled = true\n");
    let cfg = windy.to_str().unwrap();
    brickfly(&["--config", cfg, "--seed", "1", "navigate", "--out", "s1"], dir.path());
    brickfly(&["--config", cfg, "--seed", "2", "navigate", "--out", "s2"], dir.path());
    let a = fs::read(dir.path().join("s1/trajectory.csv")).unwrap();
    let b = fs::read(dir.path().join("s2/trajectory.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn tune_pd_matches_configured_gains() {
    let dir = tempfile::tempdir().unwrap();
    let out = brickfly(&["tune-pd"], dir.path());
    assert_eq!(code(&out), 0);
    let printed = String::from_utf8_lossy(&out.stdout);
    let cfg = brickfly::ExperimentConfig::from_toml_str(&printed).unwrap();
    let preset = brickfly::ExperimentConfig::preset("paper-nominal").unwrap();
    assert_eq!(cfg.pd, preset.pd);
}
