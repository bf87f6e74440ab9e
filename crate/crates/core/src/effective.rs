//! Effective Floquet Hamiltonians: Magnus expansion in the rotating frame and
//! the closed-form coefficients of the pulse-parameterized drive.
//!
//! In the frame of the echo, one period is `U_F = prod_j exp(i w_j Ntilde(t'_j))`
//! over the perturbation pulses (later pulses to the left), where
//! `Ntilde(t') = exp(i t' (Omega/2) H_PXP) N exp(-i t' (Omega/2) H_PXP)`.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::{Mat, Scale};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::basis::ConstrainedBasis;
use crate::drive::{effective_time, PulseSchedule, Propagator};
use crate::error::{invalid, Error, Result};
use crate::linalg::{apply_dense, hermitian_eigen, SymmetricEigen};
use crate::observables::StateVector;
use crate::operators::{build_number, build_pxp, build_pxyp, build_ziz, number_diagonal, SparseOperator};

/// `H_F ~ -J N - h H_PXYP + g H_PXP + (h/4) H_ZIZ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveCoefficients {
    pub j: f64,
    pub h: f64,
    pub g: f64,
}

/// Closed-form coefficients from the drive parameters.
pub fn closed_form_coefficients(omega: f64, tau: f64, epsilon: f64, gamma: f64, theta: f64) -> EffectiveCoefficients {
    EffectiveCoefficients {
        j: (gamma + 2.0 * epsilon) / tau - 3.0 * epsilon * omega * omega * tau / 32.0,
        h: -epsilon * omega * omega * tau / 32.0,
        g: -epsilon * (theta + epsilon) * omega / 8.0,
    }
}

/// Coefficients plus the diagnostics the report prints.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientReport {
    pub coefficients: EffectiveCoefficients,
    /// `J` without the second-order `-3 eps Omega^2 tau / 32` correction.
    pub j_leading: f64,
    pub omega_tau: f64,
    pub warnings: Vec<String>,
}

pub fn coefficient_report(omega: f64, tau: f64, epsilon: f64, gamma: f64, theta: f64) -> CoefficientReport {
    let coefficients = closed_form_coefficients(omega, tau, epsilon, gamma, theta);
    let mut warnings = Vec::new();
    if omega * tau / 4.0 > 1.0 {
        warnings.push(format!("Omega tau / 4 = {:.3} exceeds 1; expansion may be unreliable", omega * tau / 4.0));
    }
    if (gamma + 2.0 * epsilon).abs() < 1e-12 && epsilon != 0.0 {
        warnings.push(format!(
            "gamma = -2 epsilon: leading-order J vanishes but the full expression gives J = 3h = {:.6}",
            coefficients.j
        ));
    }
    CoefficientReport { coefficients, j_leading: (gamma + 2.0 * epsilon) / tau, omega_tau: omega * tau, warnings }
}

/// Assembles the effective Hamiltonian on `basis`.
pub fn assemble_hf(coeffs: EffectiveCoefficients, basis: &ConstrainedBasis) -> Result<SparseOperator> {
    let (n, xyp, pxp, ziz) = (build_number(basis), build_pxyp(basis), build_pxp(basis), build_ziz(basis));
    SparseOperator::linear_combination(&[
        (-coeffs.j, &n),
        (-coeffs.h, &xyp),
        (coeffs.g, &pxp),
        (coeffs.h / 4.0, &ziz),
    ])
}

/// Dense rotating-frame machinery built on one eigendecomposition of `H_PXP`.
pub struct MagnusContext {
    eig: Arc<SymmetricEigen>,
    /// `N` in the `H_PXP` eigenbasis.
    number_eig: Mat<f64>,
}

impl MagnusContext {
    pub fn new(basis: &ConstrainedBasis) -> Result<Self> {
        let eig = Arc::new(SymmetricEigen::new(&build_pxp(basis).to_dense_real()?)?);
        Self::from_eigen(basis, eig)
    }

    pub fn from_eigen(basis: &ConstrainedBasis, eig: Arc<SymmetricEigen>) -> Result<Self> {
        if eig.dim() != basis.dim() {
            return invalid("eigendecomposition does not match the basis");
        }
        let number_eig = eig.rotate_diagonal(&number_diagonal(basis));
        Ok(Self { eig, number_eig })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// `Ntilde(t')` as a dense Hermitian matrix.
    pub fn conjugated_number(&self, omega: f64, t_prime: f64) -> Mat<C64> {
        let n = self.dim();
        let w = self.eig.values();
        let v = self.eig.vectors();
        let s = 0.5 * omega * t_prime;
        let mut re = Mat::<f64>::zeros(n, n);
        let mut im = Mat::<f64>::zeros(n, n);
        for b in 0..n {
            for a in 0..n {
                let z = C64::from_polar(self.number_eig[(a, b)], s * (w[a] - w[b]));
                re[(a, b)] = z.re;
                im[(a, b)] = z.im;
            }
        }
        let re = v * &re * v.transpose();
        let im = v * &im * v.transpose();
        Mat::from_fn(n, n, |r, c| C64::new(re[(r, c)], im[(r, c)]))
    }

    /// Magnus expansion of the period through `order` (0 or 1).
    /// Needs the standard echo kicks at `tau/4` and `3tau/4`.
    pub fn magnus_hf(&self, schedule: &PulseSchedule, order: usize) -> Result<Mat<C64>> {
        if order > 1 {
            return invalid(format!("Magnus order {order} not supported"));
        }
        if !schedule.has_standard_echo() {
            return invalid("Magnus expansion needs pi echo kicks at tau/4 and 3tau/4");
        }
        let tau = schedule.tau();
        let omega = schedule.omega();
        let mut terms: Vec<(f64, Mat<C64>)> = Vec::new();
        for p in schedule.perturbations() {
            let tp = effective_time(p.time, tau)?;
            terms.push((p.weight, self.conjugated_number(omega, tp)));
        }
        let n = self.dim();
        let mut hf = Mat::<C64>::zeros(n, n);
        for (w, nt) in &terms {
            hf += Scale(C64::new(-w / tau, 0.0)) * nt;
        }
        if order == 1 {
            // sum_{j > l} w_j w_l [N_j, N_l] / (2 i tau)
            for j in 0..terms.len() {
                for l in 0..j {
                    let (wj, nj) = &terms[j];
                    let (wl, nl) = &terms[l];
                    let comm = nj * nl - nl * nj;
                    hf += Scale(C64::new(0.0, -wj * wl / (2.0 * tau))) * comm;
                }
            }
        }
        Ok(hf)
    }
}

/// `(i/tau) log U` on the principal branch, quasienergies in `(-pi/tau, pi/tau]`.
pub fn floquet_hamiltonian(u: &Mat<C64>, tau: f64) -> Result<Mat<C64>> {
    let n = u.nrows();
    if n != u.ncols() || !(tau > 0.0) {
        return invalid("need a square unitary and tau > 0");
    }
    let eig = u.eigen().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let v = eig.U();
    let s = eig.S().column_vector();
    let lu = v.partial_piv_lu();
    let v_inv = lu.solve(Mat::<C64>::identity(n, n));
    let scaled = Mat::from_fn(n, n, |r, c| v[(r, c)] * (-s[c].arg() / tau));
    let h = &scaled * &v_inv;
    Ok(Mat::from_fn(n, n, |r, c| 0.5 * (h[(r, c)] + h[(c, r)].conj())))
}

/// Evolution under a fixed Hermitian `H_F`, by dense eigendecomposition.
pub struct EffectiveEvolver {
    values: Vec<f64>,
    vectors: Mat<C64>,
    adjoint: Mat<C64>,
}

impl EffectiveEvolver {
    pub fn new(hf: &Mat<C64>) -> Result<Self> {
        let (values, vectors) = hermitian_eigen(hf)?;
        let adjoint = vectors.adjoint().to_owned();
        Ok(Self { values, vectors, adjoint })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn from_sparse(hf: &SparseOperator) -> Result<Self> {
        Self::new(&hf.to_dense())
    }

    /// `exp(-i t H_F) psi`.
    pub fn evolve(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        let coeffs: Vec<C64> = apply_dense(&self.adjoint, psi)
            .into_iter()
            .zip(&self.values)
            .map(|(c, &w)| c * C64::from_polar(1.0, -t * w))
            .collect();
        apply_dense(&self.vectors, &coeffs)
    }
}

/// `|<exp(-i H_F n tau) psi0 | U_F^n psi0>|^2` for `n = 0..=n_cycles`.
pub fn compare_floquet_vs_hf(
    prop: &Propagator,
    schedule: &PulseSchedule,
    hf: &EffectiveEvolver,
    state0: &StateVector,
    n_cycles: usize,
) -> Result<Vec<f64>> {
    let mut exact = prop.propagate_cycle(state0, schedule)?;
    let mut out = vec![1.0];
    let start = state0.amplitudes();
    for n in 1..=n_cycles {
        if n > 1 {
            exact = prop.propagate_cycle(&exact, schedule)?;
        }
        let target = hf.evolve(n as f64 * schedule.tau(), start);
        out.push(crate::linalg::inner(&target, exact.amplitudes()).norm_sqr());
    }
    Ok(out)
}
