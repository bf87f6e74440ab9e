use rydberg_floquet_demo::{domainwall_json, micromotion_json, phase_diagram_json};
use serde_json::Value;

#[test]
fn micromotion_trace_starts_at_z2() {
    let v: Value = serde_json::from_str(&micromotion_json(8, 2.0 * std::f64::consts::PI / 1.3, -0.45, 1.0, 0.15, 9, 2).unwrap()).unwrap();
    let t = v["t"].as_array().unwrap();
    assert_eq!(t.len(), 17);
    assert_eq!(v["density"][0].as_f64().unwrap(), 0.5);
    assert_eq!(v["staggered"][0].as_f64().unwrap(), -1.0);
    assert!(micromotion_json(9, 1.0, 0.0, 0.0, 0.0, 5, 1).is_err());
    assert!(micromotion_json(40, 1.0, 0.0, 0.0, 0.0, 5, 1).is_err());
}

#[test]
fn phase_diagram_endpoints() {
    let v: Value = serde_json::from_str(&phase_diagram_json(12).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    let first = rows[0]["j_over_h"].as_f64().unwrap();
    let last = rows[11]["j_over_h"].as_f64().unwrap();
    assert!((first + 3.0).abs() < 0.05, "{first}");
    assert!((last - 6.0).abs() < 0.05, "{last}");
    assert!(phase_diagram_json(1).is_err());
}

#[test]
fn domainwall_table_shape() {
    let v: Value = serde_json::from_str(&domainwall_json(5, 4.8, -0.45, 1.0, 0.15).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert!((v["coefficients"]["h"].as_f64().unwrap() - 0.0675).abs() < 1e-3);
    assert_eq!(v["rows"][0]["lambda_abs"].as_f64().unwrap(), 0.0);
}
