use std::process::{Command, Output};

fn pseudolim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudolim"))
        .args(args)
        .env_remove("PSEUDOLIM_PRECISION")
        .output()
        .expect("binary runs")
}

fn scenario_path(name: &str) -> String {
    format!("{}/scenarios/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn list_prints_builtins() {
    let out = pseudolim(&["list"]);
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(str::to_string).collect();
    assert_eq!(names, ["sqrt2_7adic", "artin_schreier_p2", "sqrt_1pt_f3t", "ostrowski_demo"]);
}

#[test]
fn exit_codes() {
    for name in ["sqrt2_7adic", "artin_schreier_p2", "sqrt_1pt_f3t", "ostrowski_demo"] {
        assert_eq!(pseudolim(&["run", name]).status.code(), Some(0), "{name}");
    }
    let tampered = scenario_path("tampered_prefix");
    assert_eq!(pseudolim(&["run", &tampered]).status.code(), Some(1));
    assert_eq!(pseudolim(&["run", "sqrt2_7adic", "--precision", "2"]).status.code(), Some(2));
    assert_eq!(pseudolim(&["run", "no/such/file.toml"]).status.code(), Some(3));
    assert_eq!(pseudolim(&["run", "sqrt2_7adic", "--precision", "0"]).status.code(), Some(3));
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let src = std::fs::read_to_string(scenario_path("tampered_prefix")).unwrap().replace("padic:7", "padic:9");
    std::fs::write(&path, src).unwrap();
    let out = pseudolim(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("ring"));
}

#[test]
fn report_file_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("sqrt2.json");
    let out = pseudolim(&["run", "sqrt2_7adic", "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let verify = pseudolim(&["verify", report.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    assert!(String::from_utf8(verify.stdout).unwrap().starts_with("consistent"));

    let text = std::fs::read_to_string(&report).unwrap();
    std::fs::write(&report, text.replacen("\"verdict\": \"PASS\"", "\"verdict\": \"FAIL\"", 1)).unwrap();
    let tampered = pseudolim(&["verify", report.to_str().unwrap()]);
    assert_eq!(tampered.status.code(), Some(1));
    assert!(String::from_utf8(tampered.stdout).unwrap().contains("verdict"));
}

#[test]
fn precision_from_environment_and_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pseudolim"));
        cmd.args(["run", "sqrt2_7adic"]).env_remove("PSEUDOLIM_PRECISION");
        if let Some(v) = env {
            cmd.env("PSEUDOLIM_PRECISION", v);
        }
        if let Some(v) = flag {
            cmd.args(["--precision", v]);
        }
        cmd.output().unwrap().status.code()
    };
    assert_eq!(run(Some("2"), None), Some(2));
    assert_eq!(run(Some("2"), Some("16")), Some(0));
    assert_eq!(run(None, Some("2")), Some(2));
    assert_eq!(run(Some("many"), None), Some(3));
}

#[test]
fn stdout_report_is_deterministic() {
    let a = pseudolim(&["run", "sqrt_1pt_f3t"]).stdout;
    let b = pseudolim(&["run", "sqrt_1pt_f3t"]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}
