//! Diagnostics evaluated on state vectors, and the series containers the CLI writes.
//!
//! Sign conventions: `|Z2>` has excitations on the even sites, so its
//! staggered magnetization `(1/L) sum_j (-1)^j <sigma^z_j>` is `-1`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::basis::{z2_bits, z2_prime_bits, BasisTag, ConstrainedBasis};
use crate::error::{invalid, Result};
use crate::linalg::{inner, norm};

/// Normalization tolerance accepted for input states.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    tag: BasisTag,
}

impl StateVector {
    /// Requires `| |psi| - 1 | <= 1e-8`.
    pub fn new(basis: &ConstrainedBasis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return invalid(format!("{} amplitudes for dimension {}", amps.len(), basis.dim()));
        }
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOL {
            return invalid(format!("state norm {n} is not 1"));
        }
        Ok(Self { amps, tag: basis.tag() })
    }

    pub fn normalized(basis: &ConstrainedBasis, mut amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Self::new(basis, amps)
    }

    pub fn basis_state(basis: &ConstrainedBasis, bits: u64) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
        amps[basis.index_of(bits)?] = C64::new(1.0, 0.0);
        Ok(Self { amps, tag: basis.tag() })
    }

    /// Neel state with excitations on the even sites.
    pub fn z2(basis: &ConstrainedBasis) -> Result<Self> {
        Self::basis_state(basis, z2_bits(basis.sites()))
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        if self.tag != other.tag {
            return invalid("states live in different bases");
        }
        Ok(inner(&self.amps, &other.amps))
    }

    pub(crate) fn check_basis(&self, basis: &ConstrainedBasis) -> Result<()> {
        if self.tag != basis.tag() || self.amps.len() != basis.dim() {
            return invalid(format!("state tagged {:?}, basis {:?}", self.tag, basis.tag()));
        }
        Ok(())
    }
}

fn z_value(bits: u64, site: usize) -> f64 {
    if bits >> site & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sum_j (-1)^j sigma^z_j` on one configuration.
fn staggered_z(bits: u64, sites: usize) -> f64 {
    (0..sites).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * z_value(bits, j)).sum()
}

fn weights(state: &StateVector) -> impl Iterator<Item = f64> + '_ {
    state.amps.iter().map(|z| z.norm_sqr())
}

pub fn rydberg_density(basis: &ConstrainedBasis, state: &StateVector) -> f64 {
    let total: f64 =
        basis.states().iter().zip(weights(state)).map(|(s, p)| p * s.count_ones() as f64).sum();
    total / basis.sites() as f64
}

pub fn staggered_magnetization(basis: &ConstrainedBasis, state: &StateVector) -> f64 {
    let l = basis.sites();
    let total: f64 = basis.states().iter().zip(weights(state)).map(|(&s, p)| p * staggered_z(s, l)).sum();
    total / l as f64
}

pub fn site_densities(basis: &ConstrainedBasis, state: &StateVector) -> Vec<f64> {
    let mut out = vec![0.0; basis.sites()];
    for (&s, p) in basis.states().iter().zip(weights(state)) {
        for (j, o) in out.iter_mut().enumerate() {
            if s >> j & 1 == 1 {
                *o += p;
            }
        }
    }
    out
}

/// Connected correlator `<z_i z_j> - <z_i><z_j>` as an `L x L` row-major matrix.
pub fn connected_zz(basis: &ConstrainedBasis, state: &StateVector) -> Vec<Vec<f64>> {
    let l = basis.sites();
    let mut zz = vec![vec![0.0; l]; l];
    let mut z = vec![0.0; l];
    for (&s, p) in basis.states().iter().zip(weights(state)) {
        if p == 0.0 {
            continue;
        }
        for i in 0..l {
            let zi = z_value(s, i);
            z[i] += p * zi;
            for j in i..l {
                zz[i][j] += p * zi * z_value(s, j);
            }
        }
    }
    for i in 0..l {
        for j in i..l {
            let c = zz[i][j] - z[i] * z[j];
            zz[i][j] = c;
            zz[j][i] = c;
        }
    }
    zz
}

fn neel_amplitudes(basis: &ConstrainedBasis, state: &StateVector) -> Result<(C64, C64)> {
    if basis.sites() % 2 == 1 {
        return invalid("Neel partner undefined for odd L");
    }
    let amp = |bits| basis.find(bits).map_or(C64::new(0.0, 0.0), |k| state.amps[k]);
    Ok((amp(z2_bits(basis.sites())), amp(z2_prime_bits(basis.sites()))))
}

/// `max_phi |<GHZ_phi|psi>|^2` with `|GHZ_phi> = (|Z2> + e^{i phi}|Z2'>)/sqrt 2`,
/// returned with the maximizing phase.
pub fn ghz_fidelity(basis: &ConstrainedBasis, state: &StateVector) -> Result<(f64, f64)> {
    let (a, b) = neel_amplitudes(basis, state)?;
    let fidelity = 0.5 * (a.norm_sqr() + b.norm_sqr()) + a.norm() * b.norm();
    let phi = if a.norm() == 0.0 || b.norm() == 0.0 {
        0.0
    } else {
        let d = b.arg() - a.arg();
        d - 2.0 * std::f64::consts::PI * (d / (2.0 * std::f64::consts::PI)).round()
    };
    Ok((fidelity, phi))
}

/// `Var(sum_j (-1)^j sigma^z_j) / L`; equals `L` on a GHZ state.
pub fn qfi_density(basis: &ConstrainedBasis, state: &StateVector) -> f64 {
    let l = basis.sites();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (&s, p) in basis.states().iter().zip(weights(state)) {
        let x = staggered_z(s, l);
        m1 += p * x;
        m2 += p * x * x;
    }
    ((m2 - m1 * m1) / l as f64).max(0.0)
}

pub fn z2_populations(basis: &ConstrainedBasis, state: &StateVector) -> Result<(f64, f64)> {
    let (a, b) = neel_amplitudes(basis, state)?;
    Ok((a.norm_sqr(), b.norm_sqr()))
}

/// Wall labels `d` of a configuration: bond `(d-1, d)` hosts a wall when its two
/// occupations agree. Type is `d mod 2`; walls of even type separate `Z2` (left)
/// from `Z2'` (right).
pub fn domain_walls(bits: u64, sites: usize) -> Vec<usize> {
    (0..sites)
        .filter(|&j| {
            let k = (j + 1) % sites;
            bits >> j & 1 == bits >> k & 1
        })
        .map(|j| (j + 1) % sites)
        .collect()
}

/// Clockwise distances from each even-type wall to the next odd-type wall.
pub fn wall_pair_distances(bits: u64, sites: usize) -> Vec<usize> {
    let walls = domain_walls(bits, sites);
    let odd: Vec<usize> = walls.iter().copied().filter(|d| d % 2 == 1).collect();
    walls
        .iter()
        .filter(|d| *d % 2 == 0)
        .filter_map(|&e| odd.iter().map(|&o| (o + sites - e) % sites).min())
        .collect()
}

/// `P(l)` for `l = 1..L-1` (index `l-1`), conditioned on at least one wall pair.
/// A configuration with several pairs splits its weight evenly over them.
/// Returns `None` when no configuration carries a pair.
pub fn domainwall_distance_distribution(
    basis: &ConstrainedBasis,
    state: &StateVector,
) -> Result<Option<Vec<f64>>> {
    let l = basis.sites();
    if l % 2 == 1 || basis.boundary() != crate::basis::Boundary::Periodic {
        return invalid("distance distribution needs an even periodic chain");
    }
    let mut hist = vec![0.0; l - 1];
    let mut total = 0.0;
    for (&s, p) in basis.states().iter().zip(weights(state)) {
        if p == 0.0 {
            continue;
        }
        let pairs = wall_pair_distances(s, l);
        if pairs.is_empty() {
            continue;
        }
        total += p;
        let share = p / pairs.len() as f64;
        for d in pairs {
            hist[d - 1] += share;
        }
    }
    if total == 0.0 {
        return Ok(None);
    }
    hist.iter_mut().for_each(|x| *x /= total);
    Ok(Some(hist))
}

/// Selectable columns of a time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Density,
    StaggeredMagnetization,
    /// Columns `ghz_fidelity`, `ghz_phase`.
    GhzFidelity,
    QfiDensity,
    /// Columns `p_z2`, `p_z2_prime`.
    Z2Populations,
    /// Columns `n_0 .. n_{L-1}`.
    SiteDensities,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Density,
        Observable::StaggeredMagnetization,
        Observable::GhzFidelity,
        Observable::QfiDensity,
        Observable::Z2Populations,
        Observable::SiteDensities,
    ];

    pub fn columns(self, sites: usize) -> Vec<String> {
        match self {
            Observable::Density => vec!["density".into()],
            Observable::StaggeredMagnetization => vec!["staggered_magnetization".into()],
            Observable::GhzFidelity => vec!["ghz_fidelity".into(), "ghz_phase".into()],
            Observable::QfiDensity => vec!["qfi_density".into()],
            Observable::Z2Populations => vec!["p_z2".into(), "p_z2_prime".into()],
            Observable::SiteDensities => (0..sites).map(|j| format!("n_{j}")).collect(),
        }
    }

    pub fn evaluate(self, basis: &ConstrainedBasis, state: &StateVector) -> Result<Vec<f64>> {
        Ok(match self {
            Observable::Density => vec![rydberg_density(basis, state)],
            Observable::StaggeredMagnetization => vec![staggered_magnetization(basis, state)],
            Observable::GhzFidelity => {
                let (f, phi) = ghz_fidelity(basis, state)?;
                vec![f, phi]
            }
            Observable::QfiDensity => vec![qfi_density(basis, state)],
            Observable::Z2Populations => {
                let (a, b) = z2_populations(basis, state)?;
                vec![a, b]
            }
            Observable::SiteDensities => site_densities(basis, state),
        })
    }
}

/// Named real columns sampled at increasing times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub metadata: Map<String, Value>,
}

impl ObservableSeries {
    pub fn new(names: Vec<String>) -> Self {
        let columns = vec![Vec::new(); names.len()];
        Self { times: Vec::new(), names, columns, metadata: Map::new() }
    }

    pub fn for_observables(observables: &[Observable], sites: usize) -> Self {
        Self::new(observables.iter().flat_map(|o| o.columns(sites)).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, time: f64, values: &[f64]) -> Result<()> {
        if values.len() != self.names.len() {
            return invalid(format!("{} values for {} columns", values.len(), self.names.len()));
        }
        if self.times.last().is_some_and(|&t| time <= t) {
            return invalid(format!("time {time} does not increase"));
        }
        self.times.push(time);
        self.columns.iter_mut().zip(values).for_each(|(c, &v)| c.push(v));
        Ok(())
    }

    /// Evaluates `observables` on `state` and appends a row.
    pub fn record(
        &mut self,
        time: f64,
        observables: &[Observable],
        basis: &ConstrainedBasis,
        state: &StateVector,
    ) -> Result<()> {
        let mut row = Vec::with_capacity(self.names.len());
        for o in observables {
            row.extend(o.evaluate(basis, state)?);
        }
        self.push(time, &row)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.columns[k].as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (r, t) in self.times.iter().enumerate() {
            out.push_str(&fmt_f64(*t));
            for c in &self.columns {
                out.push(',');
                out.push_str(&fmt_f64(c[r]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Fixed 17-significant-digit formatting so reruns are byte-identical.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

/// Long-format correlation table with columns `t,i,j,value`.
pub fn correlations_csv(snapshots: &[(f64, Vec<Vec<f64>>)]) -> String {
    let mut out = String::from("t,i,j,value\n");
    for (t, m) in snapshots {
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{},{i},{j},{}", fmt_f64(*t), fmt_f64(*v));
            }
        }
    }
    out
}
