//! Fidelity decay between the stroboscopic evolution and its effective
//! Hamiltonian, Gaussian coherence-time fits and the `(tau, |eps|)` sweep.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{Boundary, ConstrainedBasis};
use crate::drive::{DriveParams, Propagator, PulseSchedule};
use crate::effective::{assemble_hf, closed_form_coefficients};
use crate::error::{invalid, Error, Result};
use crate::linalg::{inner, Krylov};
use crate::observables::StateVector;

/// `15 * 2 pi / Omega` at `Omega = 1`.
pub const T_STAR_DEFAULT: f64 = 30.0 * PI;
/// Alternative preset `100 / Omega`.
pub const T_STAR_ALT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSettings {
    /// Samples are used until `F * damp` drops below this.
    pub floor: f64,
    pub min_points: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self { floor: 1e-3, min_points: 5 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherenceResult {
    pub tau: f64,
    pub epsilon: f64,
    pub h: f64,
    pub t_c: f64,
    /// RMS of the log-domain residual.
    pub fit_residual: f64,
    pub r_squared: f64,
    pub points: usize,
    /// `F(n tau)` for `n = 0, 1, ...`.
    pub series: Vec<f64>,
}

impl CoherenceResult {
    pub fn h_tc(&self) -> f64 {
        self.h * self.t_c
    }
}

/// `|<Psi_F(n tau)|Psi(n tau)>|^2` for `n = 0..=n_cycles` under the pure-hopping
/// drive, starting from one excitation on site 0. `prop` supplies the basis.
pub fn fidelity_decay_series(prop: &Propagator, omega: f64, tau: f64, epsilon: f64, n_cycles: usize) -> Result<Vec<f64>> {
    let basis = prop.basis();
    let params = DriveParams::pure_hopping(epsilon);
    let schedule = PulseSchedule::perturbed(omega, tau, params)?;
    let coeffs = closed_form_coefficients(omega, tau, params.epsilon, params.gamma, params.theta);
    let hf = assemble_hf(coeffs, basis)?;
    let start = StateVector::basis_state(basis, 1)?;
    let mut exact = start.clone();
    let mut target = start.amplitudes().to_vec();
    let krylov = Krylov { tol: 1e-12, ..Krylov::default() };
    let mut out = Vec::with_capacity(n_cycles + 1);
    out.push(1.0);
    for _ in 0..n_cycles {
        exact = prop.propagate_cycle(&exact, &schedule)?;
        krylov.evolve(&hf, tau, &mut target)?;
        out.push(inner(&target, exact.amplitudes()).norm_sqr());
    }
    Ok(out)
}

/// Least-squares fit of `-ln(F damp)/L = (n tau / t_c)^2` with `damp = exp(-L (n tau / t_star)^2)`.
pub fn fit_coherence(
    series: &[f64],
    tau: f64,
    sites: usize,
    t_star: f64,
    settings: FitSettings,
) -> Result<(f64, f64, f64, usize)> {
    if series.is_empty() {
        return invalid("empty fidelity series");
    }
    if !(t_star > 0.0) || !(tau > 0.0) || sites == 0 {
        return invalid("t_star, tau and L must be positive");
    }
    let l = sites as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, &f) in series.iter().enumerate().skip(1) {
        let t = n as f64 * tau;
        let damped = f * (-l * (t / t_star).powi(2)).exp();
        if f <= 1e-6 || damped < settings.floor {
            break;
        }
        xs.push(t * t);
        ys.push(-damped.ln() / l);
    }
    if xs.len() < settings.min_points {
        return Err(Error::FitFailure(format!("{} usable samples, need {}", xs.len(), settings.min_points)));
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(Error::FitFailure(format!("non-positive slope {slope:e}")));
    }
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x).powi(2)).sum();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((1.0 / slope.sqrt(), (ss_res / xs.len() as f64).sqrt(), r2, xs.len()))
}

/// Cycles after which the damping alone drops below `floor`.
pub fn cycles_needed(tau: f64, sites: usize, t_star: f64, floor: f64) -> usize {
    let t_max = t_star * (-floor.ln() / sites as f64).sqrt();
    (t_max / tau).ceil() as usize + 1
}

/// Series plus fit for one drive point.
pub fn coherence_point(
    prop: &Propagator,
    omega: f64,
    tau: f64,
    epsilon: f64,
    t_star: f64,
    settings: FitSettings,
) -> Result<CoherenceResult> {
    let sites = prop.basis().sites();
    let n = cycles_needed(tau, sites, t_star, settings.floor);
    let series = fidelity_decay_series(prop, omega, tau, epsilon, n)?;
    let h = closed_form_coefficients(omega, tau, epsilon, -2.0 * epsilon, -epsilon).h;
    let (t_c, fit_residual, r_squared, points) = fit_coherence(&series, tau, sites, t_star, settings)?;
    Ok(CoherenceResult { tau, epsilon, h, t_c, fit_residual, r_squared, points, series })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub tau: f64,
    pub abs_epsilon: f64,
    pub h: f64,
    pub t_c: Option<f64>,
    pub h_tc: Option<f64>,
    pub fit_residual: Option<f64>,
    pub r_squared: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherenceSweep {
    pub sites: usize,
    pub omega: f64,
    pub t_star: f64,
    pub taus: Vec<f64>,
    pub abs_epsilons: Vec<f64>,
    /// Row-major over `taus` then `abs_epsilons`.
    pub cells: Vec<SweepCell>,
    pub argmax: Option<(f64, f64, f64)>,
    /// Whether the maximum avoids the grid edges.
    pub interior: bool,
}

impl CoherenceSweep {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(crate::observables::fmt_f64).unwrap_or_default();
        let mut out = String::from("tau,eps,h,t_c,h_tc,residual\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                crate::observables::fmt_f64(c.tau),
                crate::observables::fmt_f64(c.abs_epsilon),
                crate::observables::fmt_f64(c.h),
                opt(c.t_c),
                opt(c.h_tc),
                opt(c.fit_residual)
            ));
        }
        out
    }
}

/// `h t_c` over the grid, for `eps = -|eps|`. Failed fits become empty cells.
pub fn sweep_coherence(
    taus: &[f64],
    abs_epsilons: &[f64],
    sites: usize,
    omega: f64,
    t_star: f64,
    settings: FitSettings,
) -> Result<CoherenceSweep> {
    if taus.is_empty() || abs_epsilons.is_empty() {
        return invalid("empty sweep grid");
    }
    if let Some(t) = taus.iter().find(|&&t| !(t > 0.0) || omega * t >= 2.0 * PI) {
        return invalid(format!("tau = {t} outside 0 < Omega tau < 2 pi"));
    }
    let basis = Arc::new(ConstrainedBasis::new(sites, Boundary::Periodic)?);
    let prop = Propagator::krylov(basis);
    let grid: Vec<(f64, f64)> = taus.iter().flat_map(|&t| abs_epsilons.iter().map(move |&e| (t, e))).collect();
    let cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(tau, ae)| {
            let h = closed_form_coefficients(omega, tau, -ae, 2.0 * ae, ae).h;
            match coherence_point(&prop, omega, tau, -ae, t_star, settings) {
                Ok(r) => SweepCell {
                    tau,
                    abs_epsilon: ae,
                    h,
                    t_c: Some(r.t_c),
                    h_tc: Some(r.h_tc()),
                    fit_residual: Some(r.fit_residual),
                    r_squared: Some(r.r_squared),
                    error: None,
                },
                Err(e) => SweepCell {
                    tau,
                    abs_epsilon: ae,
                    h,
                    t_c: None,
                    h_tc: None,
                    fit_residual: None,
                    r_squared: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let best = cells
        .iter()
        .enumerate()
        .filter_map(|(k, c)| c.h_tc.map(|v| (k, v)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let ne = abs_epsilons.len();
    let interior = best.is_some_and(|(k, _)| {
        let (i, j) = (k / ne, k % ne);
        i > 0 && i + 1 < taus.len() && j > 0 && j + 1 < ne
    });
    Ok(CoherenceSweep {
        sites,
        omega,
        t_star,
        taus: taus.to_vec(),
        abs_epsilons: abs_epsilons.to_vec(),
        argmax: best.map(|(k, v)| (cells[k].tau, cells[k].abs_epsilon, v)),
        cells,
        interior,
    })
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}
