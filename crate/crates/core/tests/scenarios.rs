use std::fs;
use std::path::Path;

use rydberg_floquet::config::parse_config;
use rydberg_floquet::scenarios::{run_scenario, scenario_listing};

fn run(text: &str) -> (tempfile::TempDir, rydberg_floquet::Result<Vec<String>>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(text, Path::new("inline.json")).unwrap();
    let r = run_scenario(&cfg, dir.path()).map(|m| m.files);
    (dir, r)
}

fn header(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn fig2_small_chain() {
    let (dir, files) = run(r#"{"scenario": "fig2-entanglement", "physics": {"sites": 8}, "runtime": {"n_cycles": 12, "snapshot_stride": 4}}"#);
    let files = files.unwrap();
    for f in ["observables.csv", "observables.json", "correlations.csv", "summary.json"] {
        assert!(files.iter().any(|x| x == f), "{f} in {files:?}");
    }
    let h = header(dir.path(), "observables.csv");
    assert!(h.starts_with("t,") && h.contains("qfi_density") && h.contains("ghz_fidelity"), "{h}");
    let rows = fs::read_to_string(dir.path().join("observables.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 13);
}

#[test]
fn domainwall_tables() {
    let (dir, files) = run(r#"{"scenario": "fig3a-domainwall", "physics": {"sites": 10}}"#);
    assert!(files.unwrap().iter().any(|f| f == "two_wall.json"));
    let csv = fs::read_to_string(dir.path().join("dispersion.csv")).unwrap();
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn gamma_sweep_flags_resonance() {
    let (dir, files) =
        run(r#"{"scenario": "figS2-gamma-sweep", "physics": {"sites": 8}, "runtime": {"n_cycles": 5}, "sweep": {"gamma": [1.0, -1.5]}}"#);
    files.unwrap();
    let csv = fs::read_to_string(dir.path().join("gamma_summary.csv")).unwrap();
    let flags: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(flags, vec!["1", "0"]);
    assert_eq!(fs::read_to_string(dir.path().join("gamma_series.csv")).unwrap().lines().count(), 1 + 2 * 6);
}

#[test]
fn distance_distribution_rows() {
    let (dir, files) = run(r#"{"scenario": "figS3-distances", "physics": {"sites": 8}, "runtime": {"n_cycles": 4, "snapshot_stride": 2}}"#);
    files.unwrap();
    assert_eq!(header(dir.path(), "distances.csv"), "t,l,probability");
}

#[test]
fn hardware_small_walk() {
    let (dir, files) = run(r#"{"scenario": "fig4-hardware", "physics": {"sites": 6}, "runtime": {"n_cycles": 3}}"#);
    files.unwrap();
    assert_eq!(header(dir.path(), "heatmap.csv"), "cycle,site,value,model");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("benchmark.json")).unwrap()).unwrap();
    assert!(v["dt_halving_change"].as_f64().unwrap() < 1e-6);
}

#[test]
fn hardware_requires_pure_hopping() {
    let (dir, r) = run(r#"{"scenario": "fig4-hardware", "physics": {"sites": 6, "gamma": 0.3}, "runtime": {"n_cycles": 1}}"#);
    assert!(r.is_err());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "failed");
    assert_eq!(m["partial"], true);
}

#[test]
fn coherence_grid() {
    let (dir, files) = run(r#"{"scenario": "figS4-coherence-sweep", "physics": {"sites": 8}, "sweep": {"tau": [3.0, 4.0], "abs_epsilon": [0.2, 0.3]}}"#);
    files.unwrap();
    let csv = fs::read_to_string(dir.path().join("coherence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn listing_matches_scenarios() {
    assert_eq!(scenario_listing().lines().count(), 9);
}
