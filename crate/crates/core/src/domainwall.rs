//! Two-domain-wall sector of the `g = 0` effective chain.
//!
//! On a periodic chain of `L = 2M` sites the sector with `M - 1` excitations
//! holds exactly one even-type and one odd-type wall. Cells are `u = d / 2` for
//! wall label `d`; the relative coordinate is `r = (u_odd - u_even) mod M`.
//! At zero total momentum the pair wavefunction is `e^{ikr} + S e^{-ikr}` with
//! `S = S(k, -k)`, quantized by `S(k, -k) = +- e^{ik(M-1)}`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::basis::{z2_bits, Boundary, ConstrainedBasis};
use crate::effective::{assemble_hf, EffectiveCoefficients};
use crate::error::{invalid, Error, Result};
use crate::linalg::{norm, LinearOperator, SymmetricEigen};
use crate::observables::domain_walls;
use crate::operators::build_pxp;

/// Single domain-wall dispersion `-2h cos k`.
pub fn single_dispersion(k: f64, h: f64) -> f64 {
    -2.0 * h * k.cos()
}

/// Vacuum (`Z2`) and pair energies of the `g = 0` model on `L` sites.
pub fn pair_energies(k: f64, kprime: f64, h: f64, j: f64, sites: usize) -> (f64, f64) {
    let l = sites as f64;
    let vacuum = -j * l / 2.0 + h * l / 4.0;
    let pair = -j * (l / 2.0 - 1.0) + h * (l - 8.0) / 4.0 + single_dispersion(k, h) + single_dispersion(kprime, h);
    (vacuum, pair)
}

/// Resonance offset `delta(k) = E_{k,-k} - E_vac = J - 2h - 4h cos k`.
pub fn resonance_offset(k: f64, h: f64, j: f64) -> f64 {
    j - 2.0 * h - 4.0 * h * k.cos()
}

/// `S(k, k') = -(e^{-ik} + e^{ik'} + 1) / (e^{ik} + e^{-ik'} + 1)`.
pub fn scattering_phase(k: f64, kprime: f64) -> Result<C64> {
    let num = C64::from_polar(1.0, -k) + C64::from_polar(1.0, kprime) + 1.0;
    let den = C64::from_polar(1.0, k) + C64::from_polar(1.0, -kprime) + 1.0;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("scattering denominator vanishes at ({k}, {kprime})")));
    }
    Ok(-num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairBoundary {
    Periodic,
    Open,
}

impl PairBoundary {
    pub fn norm(self) -> f64 {
        match self {
            PairBoundary::Periodic => SQRT_2,
            PairBoundary::Open => 2.0,
        }
    }
}

/// Vacuum coupling `lambda(k) = g (N_bc / 2) 4i sin k / (2e^{ik} + 1)`.
pub fn coupling_lambda(k: f64, g: f64, bc: PairBoundary) -> C64 {
    let den = 2.0 * C64::from_polar(1.0, k) + 1.0;
    g * bc.norm() / 2.0 * C64::new(0.0, 4.0 * k.sin()) / den
}

/// Quantized zero-momentum pair momenta in `(0, pi)`, ascending.
pub fn quantized_momenta(sites: usize) -> Result<Vec<f64>> {
    if sites % 2 == 1 || sites < 6 {
        return invalid(format!("need an even chain with L >= 6, got {sites}"));
    }
    let m = (sites / 2) as f64;
    let mut roots = Vec::new();
    for sign in [1.0, -1.0] {
        // phase of S(k,-k) e^{-ik(M-1)} / sign
        let f = |k: f64| -> f64 {
            let s = scattering_phase(k, -k).unwrap_or(C64::new(1.0, 0.0));
            (s * C64::from_polar(sign, -k * (m - 1.0))).arg()
        };
        let n_scan = 4000 * sites;
        let grid: Vec<f64> = (0..=n_scan).map(|i| 1e-9 + (PI - 2e-9) * i as f64 / n_scan as f64).collect();
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut fa, fb) = (f(a), f(b));
            // sign change through zero, not through the branch cut at +-pi
            if fa * fb > 0.0 || (fa - fb).abs() > 1.0 {
                continue;
            }
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                let fc = f(c);
                if fa * fc <= 0.0 {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
                if b - a < 1e-15 {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(roots)
}

/// Cells `(u_even, u_odd)` of a two-wall configuration.
fn wall_cells(bits: u64, sites: usize) -> Option<(usize, usize)> {
    let walls = domain_walls(bits, sites);
    match walls.as_slice() {
        [a, b] if a % 2 != b % 2 => {
            let (e, o) = if a % 2 == 0 { (*a, *b) } else { (*b, *a) };
            Some((e / 2, o / 2))
        }
        _ => None,
    }
}

/// Pair amplitudes `e^{ikr} + S e^{-ikr}` on the two-wall sector basis.
pub fn pair_ansatz(sector: &ConstrainedBasis, k: f64) -> Result<Vec<C64>> {
    let l = sector.sites();
    let m = l / 2;
    let s = scattering_phase(k, -k)?;
    sector
        .states()
        .iter()
        .map(|&bits| {
            let (ue, uo) = wall_cells(bits, l)
                .ok_or_else(|| Error::InvalidArgument(format!("{bits:#b} is not a two-wall configuration")))?;
            let r = ((uo + m - ue) % m) as f64;
            Ok(C64::from_polar(1.0, k * r) + s * C64::from_polar(1.0, -k * r))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoWallReport {
    pub sites: usize,
    pub h: f64,
    pub j: f64,
    pub momenta: Vec<f64>,
    pub bethe_energies: Vec<f64>,
    pub ed_energies: Vec<f64>,
    pub max_energy_error: f64,
    pub max_residual: f64,
    /// `|lambda(k) - (N_pbc / L) <Z2| g H_PXP |k;-k>|` maximized over the roots, at `g = 1`.
    pub max_lambda_error: f64,
}

/// Checks the pair ansatz against exact diagonalization of the two-wall sector.
pub fn validate_two_dw_sector(sites: usize, h: f64, j: f64) -> Result<TwoWallReport> {
    if sites % 2 == 1 || !(6..=24).contains(&sites) {
        return invalid(format!("need even L in 6..=24, got {sites}"));
    }
    let m = sites / 2;
    let sector = ConstrainedBasis::sector(sites, Boundary::Periodic, m - 1)?;
    let hf = assemble_hf(EffectiveCoefficients { j, h, g: 0.0 }, &sector)?;

    // zero-momentum block in the relative coordinate r
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (idx, &bits) in sector.states().iter().enumerate() {
        let (ue, uo) = wall_cells(bits, sites)
            .ok_or_else(|| Error::InvalidArgument(format!("{bits:#b} is not a two-wall configuration")))?;
        members[(uo + m - ue) % m].push(idx);
    }
    let mut block = faer::Mat::<f64>::zeros(m, m);
    let mut x = vec![C64::new(0.0, 0.0); sector.dim()];
    let mut y = x.clone();
    for (c, cols) in members.iter().enumerate() {
        x.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        cols.iter().for_each(|&i| x[i] = C64::new(1.0 / (cols.len() as f64).sqrt(), 0.0));
        hf.apply(&x, &mut y);
        for (r, rows) in members.iter().enumerate() {
            let v: C64 = rows.iter().map(|&i| y[i]).sum();
            block[(r, c)] = v.re / (rows.len() as f64).sqrt();
        }
    }
    let ed_energies = SymmetricEigen::new(&block)?.values().to_vec();

    let momenta = quantized_momenta(sites)?;
    let mut bethe_energies: Vec<f64> =
        momenta.iter().map(|&k| pair_energies(k, -k, h, j, sites).1).collect();
    bethe_energies.sort_by(f64::total_cmp);
    let max_energy_error = if bethe_energies.len() == ed_energies.len() {
        bethe_energies.iter().zip(&ed_energies).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };

    let full = ConstrainedBasis::new(sites, Boundary::Periodic)?;
    let pxp = build_pxp(&full);
    let z2 = full.index_of(z2_bits(sites))?;
    let mut max_residual: f64 = 0.0;
    let mut max_lambda_error: f64 = 0.0;
    for &k in &momenta {
        let psi = pair_ansatz(&sector, k)?;
        let e = pair_energies(k, -k, h, j, sites).1;
        let mut hpsi = vec![C64::new(0.0, 0.0); sector.dim()];
        hf.apply(&psi, &mut hpsi);
        let resid: Vec<C64> = hpsi.iter().zip(&psi).map(|(a, b)| a - e * b).collect();
        max_residual = max_residual.max(norm(&resid) / norm(&psi));

        let mut lifted = vec![C64::new(0.0, 0.0); full.dim()];
        for (a, &bits) in psi.iter().zip(sector.states()) {
            lifted[full.index_of(bits)?] = *a;
        }
        let mut out = vec![C64::new(0.0, 0.0); full.dim()];
        pxp.apply(&lifted, &mut out);
        let element = out[z2] * (PairBoundary::Periodic.norm() / sites as f64);
        let err = (element - coupling_lambda(k, 1.0, PairBoundary::Periodic)).norm();
        max_lambda_error = max_lambda_error.max(err);
    }
    Ok(TwoWallReport {
        sites,
        h,
        j,
        momenta,
        bethe_energies,
        ed_energies,
        max_energy_error,
        max_residual,
        max_lambda_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionRow {
    pub k: f64,
    pub dispersion: f64,
    pub delta: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub lambda_abs: f64,
}

/// `eps(k)`, `delta(k)` and `lambda(k)` on `points` momenta in `[0, pi]`.
pub fn dispersion_table(points: usize, h: f64, j: f64, g: f64, bc: PairBoundary) -> Vec<DispersionRow> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let k = PI * i as f64 / (n - 1) as f64;
            let lam = coupling_lambda(k, g, bc);
            DispersionRow {
                k,
                dispersion: single_dispersion(k, h),
                delta: resonance_offset(k, h, j),
                lambda_re: lam.re,
                lambda_im: lam.im,
                lambda_abs: lam.norm(),
            }
        })
        .collect()
}
