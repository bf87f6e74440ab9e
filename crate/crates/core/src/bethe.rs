//! Ground state of the integrable `g = 0` effective chain from the linear
//! integral equations of its domain-wall gas (anisotropy angle `pi/3`).
//!
//! For a density `n0` the rapidities fill `[-U0, U0]` and
//!
//! ```text
//! Q(U)   + int K(U - V) Q(V)   dV = Q0(U)
//! eta(U) + int K(U - V) eta(V) dV = 1
//! K(x)  = sin(2pi/3) / (2pi (cosh x - cos 2pi/3))
//! Q0(u) = sin(pi/3)  / (2pi (cosh u - cos pi/3))
//! ```
//!
//! `U0` is fixed by `int Q = n0/(1-n0)` for `n0 <= 1/3` and by
//! `int Q = (1-2n0)/(1-n0)` above; the two meet at `U0 = infinity`.

use std::f64::consts::PI;

use faer::linalg::solvers::Solve;
use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

const GAMMA: f64 = PI / 3.0;
/// Beyond this the quadrature no longer resolves the equations.
const U_MAX: f64 = 40.0;

fn kernel(x: f64) -> f64 {
    (2.0 * GAMMA).sin() / (2.0 * PI * (x.cosh() - (2.0 * GAMMA).cos()))
}

fn driving(u: f64) -> f64 {
    GAMMA.sin() / (2.0 * PI * (u.cosh() - GAMMA.cos()))
}

/// Bare domain-wall energy `-2h sin^2(pi/3) / (cosh U - cos pi/3)`.
pub fn bare_energy(u: f64, h: f64) -> f64 {
    -2.0 * h * GAMMA.sin().powi(2) / (u.cosh() - GAMMA.cos())
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetheSettings {
    pub quad_n: usize,
    /// Tolerance on the density constraint.
    pub tol: f64,
}

impl Default for BetheSettings {
    fn default() -> Self {
        Self { quad_n: 128, tol: 1e-12 }
    }
}

/// Nystrom solution on a fixed interval.
#[derive(Debug, Clone, Serialize)]
pub struct BetheSolution {
    pub n0: f64,
    pub u0: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub q: Vec<f64>,
    pub eta: Vec<f64>,
    /// `Q` and `eta` interpolated to the Fermi point.
    pub q_u0: f64,
    pub eta_u0: f64,
    pub branch: u8,
    pub constraint_residual: f64,
}

fn solve_fixed(u0: f64, quad_n: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, f64, f64)> {
    let (x, w) = gauss_legendre(quad_n);
    let u: Vec<f64> = x.iter().map(|t| u0 * t).collect();
    let w: Vec<f64> = w.iter().map(|t| u0 * t).collect();
    let n = quad_n;
    let a = Mat::from_fn(n, n, |r, c| (r == c) as u8 as f64 + kernel(u[r] - u[c]) * w[c]);
    let rhs = Mat::from_fn(n, 2, |r, c| if c == 0 { driving(u[r]) } else { 1.0 });
    let sol = a.partial_piv_lu().solve(&rhs);
    let q: Vec<f64> = (0..n).map(|r| sol[(r, 0)]).collect();
    let eta: Vec<f64> = (0..n).map(|r| sol[(r, 1)]).collect();
    if !q.iter().chain(&eta).all(|v| v.is_finite()) {
        return Err(Error::LinearAlgebra(format!("Nystrom system singular at U0 = {u0}")));
    }
    let tail = |f: &[f64]| -> f64 { (0..n).map(|k| w[k] * kernel(u0 - u[k]) * f[k]).sum() };
    let q_u0 = driving(u0) - tail(&q);
    let eta_u0 = 1.0 - tail(&eta);
    Ok((u, w, q, eta, q_u0, eta_u0))
}

fn integral(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).map(|(a, b)| a * b).sum()
}

/// Closed-form limits at `n0 = 0` and `n0 = 1/2`.
fn endpoint(n0: f64, branch: u8) -> BetheSolution {
    BetheSolution {
        n0,
        u0: 0.0,
        nodes: vec![],
        weights: vec![],
        q: vec![],
        eta: vec![],
        q_u0: driving(0.0),
        eta_u0: 1.0,
        branch,
        constraint_residual: 0.0,
    }
}

pub fn constraint_target(n0: f64) -> (u8, f64) {
    if n0 <= 1.0 / 3.0 {
        (1, n0 / (1.0 - n0))
    } else {
        (2, (1.0 - 2.0 * n0) / (1.0 - n0))
    }
}

/// Solves for the Fermi point `U0` at density `n0` by bracketed bisection.
pub fn solve_integral_equations(n0: f64, settings: BetheSettings) -> Result<BetheSolution> {
    if !(0.0..=0.5).contains(&n0) {
        return invalid(format!("density {n0} outside [0, 1/2]"));
    }
    if settings.quad_n < 32 {
        return invalid(format!("quad_n = {} below 32", settings.quad_n));
    }
    if n0 == 0.0 {
        return Ok(endpoint(0.0, 1));
    }
    if n0 == 0.5 {
        return Ok(endpoint(0.5, 2));
    }
    let (branch, target) = constraint_target(n0);
    let mass = |u0: f64| -> Result<f64> {
        let (_, w, q, ..) = solve_fixed(u0, settings.quad_n)?;
        Ok(integral(&w, &q))
    };
    let (mut lo, mut hi) = (0.0, 0.5);
    while mass(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > U_MAX {
            return Err(Error::NoConvergence(format!(
                "n0 = {n0}: constraint {target} not bracketed for U0 <= {U_MAX} (n0 = 1/3 sits at U0 = infinity)"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = mass(mid)?;
        if (m - target).abs() < settings.tol || hi - lo < 1e-15 * hi {
            lo = mid;
            hi = mid;
            break;
        }
        if m < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u0 = 0.5 * (lo + hi);
    let (nodes, weights, q, eta, q_u0, eta_u0) = solve_fixed(u0, settings.quad_n)?;
    let residual = (integral(&weights, &q) - target).abs();
    if residual > 1e3 * settings.tol.max(1e-13) {
        return Err(Error::NoConvergence(format!("n0 = {n0}: constraint residual {residual:e}")));
    }
    Ok(BetheSolution { n0, u0, nodes, weights, q, eta, q_u0, eta_u0, branch, constraint_residual: residual })
}

/// `K = (1 - n0)^2 eta(U0)^2`.
pub fn luttinger_k(sol: &BetheSolution) -> f64 {
    (1.0 - sol.n0).powi(2) * sol.eta_u0.powi(2)
}

fn dressed_integral(sol: &BetheSolution, h: f64) -> f64 {
    (0..sol.q.len()).map(|k| sol.weights[k] * bare_energy(sol.nodes[k], h) * sol.q[k]).sum()
}

/// Ground-state energy per site at `J = 0`, measured from the `(h/4) H_ZIZ`
/// background: the assembled `H_F` gives this plus `h/4`.
pub fn ground_energy(sol: &BetheSolution, h: f64) -> f64 {
    (1.0 - sol.n0) * dressed_integral(sol, h)
}

/// Chemical potential `J` at which `n0` is the ground-state density,
/// `J = dE/dn0`, in the same units as `h`.
pub fn chemical_potential(sol: &BetheSolution, h: f64) -> Result<f64> {
    let fermi = -4.0 * PI * h * GAMMA.sin() * sol.q_u0;
    let denom = (1.0 - sol.n0) * sol.eta_u0;
    if denom.abs() < 1e-14 {
        return Err(Error::Singular(format!("n0 = {}: (1 - n0) eta(U0) vanishes", sol.n0)));
    }
    let sign = if sol.branch == 1 { 1.0 } else { -1.0 };
    Ok(-dressed_integral(sol, h) + sign * fermi / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    pub n0: f64,
    pub u0: f64,
    pub k: f64,
    pub j_over_h: f64,
    pub energy: f64,
}

/// Tabulates `(n0, U0, K, J/h, E)` over `n0_grid` (sorted on output).
pub fn phase_diagram(n0_grid: &[f64], h: f64, settings: BetheSettings) -> Result<Vec<PhaseRow>> {
    if h <= 0.0 {
        return invalid("h must be positive");
    }
    let mut grid = n0_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.par_iter()
        .map(|&n0| {
            let sol = solve_integral_equations(n0, settings)?;
            Ok(PhaseRow {
                n0,
                u0: sol.u0,
                k: luttinger_k(&sol),
                j_over_h: chemical_potential(&sol, h)? / h,
                energy: ground_energy(&sol, h),
            })
        })
        .collect()
}

/// Stability thresholds marked on the phase diagram.
pub const K_THRESHOLDS: [f64; 2] = [0.5, 0.125];
