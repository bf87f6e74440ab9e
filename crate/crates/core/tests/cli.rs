use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rydberg-floquet"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn lists_every_scenario() {
    let o = bin().arg("list-scenarios").output().unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["fig2-entanglement", "fig4-hardware", "figS4-coherence-sweep", "effective-report"] {
        assert!(text.contains(name), "{text}");
    }
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn validate_prints_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f2.json", r#"{"scenario": "fig2-entanglement"}"#);
    let o = bin().arg("validate").arg(&cfg).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = &v["coefficients"];
    assert!((c["j"].as_f64().unwrap() - 0.225).abs() < 1e-3);
    assert!((c["h"].as_f64().unwrap() - 0.068).abs() < 1e-3);
    assert!((c["g"].as_f64().unwrap() + 0.017).abs() < 1e-3);
    assert_eq!(v["dim"], 2207);

    let o = bin().arg("validate").arg(&cfg).args(["--sites", "30"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("krylov"), "{}", stderr(&o));
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().arg("run").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("usage"));

    let cfg = write_config(dir.path(), "bad.json", "{\"scenario\": \"effective-report\", \"extra\": 1}");
    let o = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.json:1:"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "odd.json", r#"{"scenario": "fig2-entanglement", "physics": {"sites": 9}}"#);
    let o = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn effective_report_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.json", r#"{"scenario": "effective-report"}"#);
    let out = dir.path().join("out");
    let o = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["coefficients.json", "magnus.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "ok");
    assert_eq!(m["resolved"]["sites"], 8);
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{"scenario": "fig1b-micromotion", "physics": {"sites": 10}, "runtime": {"n_cycles": 2}}"#,
    );
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = bin().arg("run").arg(&cfg).arg("--out").arg(&out).args(["--epsilon", "-0.3"]).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(out.join("micromotion.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 40 + 1);
}

#[test]
fn phase_diagram_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"scenario": "fig3c-phase-diagram", "sweep": {"filling": [0.05, 0.2, 0.45]}, "output": {"formats": ["csv"]}}"#,
    );
    let out = dir.path().join("p");
    let o = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("phase_diagram.csv")).unwrap();
    assert!(csv.starts_with("n0,u0,K,J_over_h,energy\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(!out.join("phase_diagram.json").exists());
}
