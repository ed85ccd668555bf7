use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/scenarios")).join(format!("{name}.json"))
}

fn wavedecay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavedecay")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("burgers_fan");
    let o = wavedecay(&["verify", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["report.json", "margins.csv", "profiles.csv", "q_series.csv"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["kappa_used"], 20.0);
}

#[test]
fn verify_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let path = scenario("burgers_random");
    for d in [&a, &b] {
        let o = wavedecay(&["verify", "--scenario", path.to_str().unwrap(), "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["report.json", "margins.csv", "profiles.csv", "q_series.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema\": 1,\n  \"name\": \"x\",\n").unwrap();
    let o = wavedecay(&["verify", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn unknown_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(scenario("burgers_fan")).unwrap()).unwrap();
    v["kapa"] = 3.0.into();
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = wavedecay(&["verify", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kapa"), "{}", stderr(&o));
}

#[test]
fn budget_overrun_exits_with_time() {
    let path = scenario("near_budget");
    let o = wavedecay(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("t = 0.22"), "{}", stderr(&o));
}

#[test]
fn failed_ordering_exits_one() {
    let path = scenario("p_system_shock_crossing");
    let o = wavedecay(&["verify", "--scenario", path.to_str().unwrap(), "--kappa", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ordering fails: t = 0.5, family 1"), "{}", stderr(&o));
}

#[test]
fn empty_kappa_range_is_rejected() {
    let path = scenario("burgers_fan");
    let o = wavedecay(&["sweep", "--scenario", path.to_str().unwrap(), "--kappa-range", ""]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn sweep_is_monotone_in_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("p_system_shock_crossing");
    let o = wavedecay(&[
        "sweep",
        "--scenario",
        path.to_str().unwrap(),
        "--kappa-range",
        "0:2:6",
        "--delta",
        "0.004",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let margins: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(margins.len(), 6);
    assert!(margins.windows(2).all(|w| w[1] >= w[0]));
    assert!(margins[0] < 0.0 && *margins.last().unwrap() == 0.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap(), text);
}

#[test]
fn simulate_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("burgers_merging_shocks");
    let o = wavedecay(&["simulate", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines = std::fs::read_to_string(dir.path().join("trajectory.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 3);
    for l in lines.lines() {
        serde_json::from_str::<serde_json::Value>(l).unwrap();
    }
    let events = std::fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert_eq!(events.lines().count(), 2);
}

#[test]
fn rearrange_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wavedecay"))
        .args(["rearrange", "--measure", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"atoms": [[5.0, 0.5]], "density": [[0.0, 2.0, 1.0]]}"#).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let p: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(p["origin"], 0.25);
    assert_eq!(p["plateau"], 1.25);
}
