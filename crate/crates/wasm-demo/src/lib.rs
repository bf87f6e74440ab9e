//! WebAssembly bindings for the browser demo. Each export returns a JSON string
//! that `www/index.html` plots; the `*_json` functions are the same calls
//! without the JS boundary.

use std::sync::Arc;

use rydberg_floquet::bethe::{chemical_potential, ground_energy, luttinger_k, solve_integral_equations, BetheSettings};
use rydberg_floquet::domainwall::{dispersion_table, PairBoundary};
use rydberg_floquet::drive::{DriveParams, Propagator, PulseSchedule};
use rydberg_floquet::effective::closed_form_coefficients;
use rydberg_floquet::observables::{Observable, StateVector};
use rydberg_floquet::{Boundary, ConstrainedBasis};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest chain the page may request.
pub const MAX_DEMO_SITES: usize = 18;

#[derive(Serialize)]
struct Trace {
    t: Vec<f64>,
    density: Vec<f64>,
    staggered: Vec<f64>,
}

pub fn micromotion_json(
    sites: usize,
    tau: f64,
    epsilon: f64,
    gamma: f64,
    theta: f64,
    samples_per_cycle: usize,
    n_cycles: usize,
) -> Result<String, String> {
    if sites > MAX_DEMO_SITES || sites % 2 == 1 {
        return Err(format!("sites must be even and at most {MAX_DEMO_SITES}"));
    }
    let run = || -> rydberg_floquet::Result<String> {
        let basis = Arc::new(ConstrainedBasis::new(sites, Boundary::Periodic)?);
        let prop = Propagator::krylov(basis.clone());
        let schedule = PulseSchedule::perturbed(1.0, tau, DriveParams { epsilon, gamma, theta })?;
        let series = prop.micromotion_run(
            &StateVector::z2(&basis)?,
            &schedule,
            samples_per_cycle,
            n_cycles,
            &[Observable::Density, Observable::StaggeredMagnetization],
        )?;
        let trace = Trace { t: series.times.clone(), density: series.columns[0].clone(), staggered: series.columns[1].clone() };
        Ok(serde_json::to_string(&trace)?)
    };
    run().map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PhasePoint {
    n0: f64,
    k: f64,
    j_over_h: f64,
    energy: f64,
}

/// `points` fillings on `(0, 1/2)`, skipping the `n0 = 1/3` branch point.
pub fn phase_diagram_json(points: usize) -> Result<String, String> {
    if !(2..=400).contains(&points) {
        return Err("points must be in 2..=400".into());
    }
    let settings = BetheSettings { quad_n: 64, ..BetheSettings::default() };
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let n0 = 0.001 + 0.4989 * i as f64 / (points - 1) as f64;
        if (n0 - 1.0 / 3.0).abs() < 1e-6 {
            continue;
        }
        let sol = solve_integral_equations(n0, settings).map_err(|e| e.to_string())?;
        let mu = chemical_potential(&sol, 1.0).map_err(|e| e.to_string())?;
        rows.push(PhasePoint { n0, k: luttinger_k(&sol), j_over_h: mu, energy: ground_energy(&sol, 1.0) });
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// `eps(k)`, `delta(k)`, `|lambda(k)|` for the drive `(tau, eps, gamma, theta)` at `Omega = 1`.
pub fn domainwall_json(points: usize, tau: f64, epsilon: f64, gamma: f64, theta: f64) -> Result<String, String> {
    if !(2..=2000).contains(&points) {
        return Err("points must be in 2..=2000".into());
    }
    let c = closed_form_coefficients(1.0, tau, epsilon, gamma, theta);
    let rows = dispersion_table(points, c.h, c.j, c.g, PairBoundary::Periodic);
    serde_json::to_string(&serde_json::json!({"coefficients": c, "rows": rows})).map_err(|e| e.to_string())
}

fn sequential() {
    faer::set_global_parallelism(faer::Par::Seq);
}

#[wasm_bindgen]
pub fn micromotion(
    sites: usize,
    tau: f64,
    epsilon: f64,
    gamma: f64,
    theta: f64,
    samples_per_cycle: usize,
    n_cycles: usize,
) -> Result<String, JsError> {
    sequential();
    micromotion_json(sites, tau, epsilon, gamma, theta, samples_per_cycle, n_cycles).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phase_diagram(points: usize) -> Result<String, JsError> {
    sequential();
    phase_diagram_json(points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn domainwall_table(points: usize, tau: f64, epsilon: f64, gamma: f64, theta: f64) -> Result<String, JsError> {
    domainwall_json(points, tau, epsilon, gamma, theta).map_err(|e| JsError::new(&e))
}
