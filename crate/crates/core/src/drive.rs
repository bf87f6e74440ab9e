//! Detuning pulse schedules and stroboscopic propagation of the driven PXP chain.
//!
//! Between pulses the chain evolves under `(Omega/2) H_PXP`; a delta pulse of
//! weight `w` multiplies the state by `exp(+i w N)`. Within one period the
//! perturbation pulses sit at `tau/4`, `tau/2`, `3tau/4` and `tau`, with the
//! echo kicks at `tau/4` and `3tau/4`. At a shared time the perturbation is
//! applied first.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::basis::ConstrainedBasis;
use crate::error::{invalid, Result};
use crate::linalg::{Krylov, SymmetricEigen};
use crate::observables::{Observable, ObservableSeries, StateVector, NORM_TOL};
use crate::operators::{build_pxp, number_diagonal, SparseOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    EchoPi,
    Perturbation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    pub time: f64,
    pub weight: f64,
    pub kind: PulseKind,
}

/// Dimensionless perturbation strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub theta: f64,
}

impl DriveParams {
    /// `-2 epsilon = gamma = 2 theta`: pure hopping, `g = 0`.
    pub fn pure_hopping(epsilon: f64) -> Self {
        Self { epsilon, gamma: -2.0 * epsilon, theta: -epsilon }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self { epsilon: s * self.epsilon, gamma: s * self.gamma, theta: s * self.theta }
    }
}

/// One Floquet period of delta detuning pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    omega: f64,
    tau: f64,
    pulses: Vec<Pulse>,
    params: Option<DriveParams>,
}

fn check_positive(omega: f64, tau: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite() && tau > 0.0 && tau.is_finite()) {
        return invalid(format!("omega and tau must be positive, got {omega}, {tau}"));
    }
    Ok(())
}

impl PulseSchedule {
    /// Two `pi` kicks per period at `tau/4` and `3tau/4`.
    pub fn echo(omega: f64, tau: f64) -> Result<Self> {
        Self::perturbed_with_echo(omega, tau, DriveParams { epsilon: 0.0, gamma: 0.0, theta: 0.0 }, PI)
            .map(|mut s| {
                s.params = None;
                s
            })
    }

    pub fn perturbed(omega: f64, tau: f64, params: DriveParams) -> Result<Self> {
        Self::perturbed_with_echo(omega, tau, params, PI)
    }

    /// Like [`PulseSchedule::perturbed`] with a custom echo weight (`-pi` on hardware).
    pub fn perturbed_with_echo(omega: f64, tau: f64, params: DriveParams, echo: f64) -> Result<Self> {
        check_positive(omega, tau)?;
        let DriveParams { epsilon, gamma, theta } = params;
        if ![epsilon, gamma, theta, echo].iter().all(|x| x.is_finite()) {
            return invalid("non-finite pulse weight");
        }
        let p = |time, weight| Pulse { time, weight, kind: PulseKind::Perturbation };
        let e = |time| Pulse { time, weight: echo, kind: PulseKind::EchoPi };
        let pulses = [
            p(tau / 4.0, epsilon),
            e(tau / 4.0),
            p(tau / 2.0, theta),
            p(3.0 * tau / 4.0, epsilon),
            e(3.0 * tau / 4.0),
            p(tau, gamma - theta),
        ]
        .into_iter()
        .filter(|q| q.weight != 0.0)
        .collect();
        Ok(Self { omega, tau, pulses, params: Some(params) })
    }

    /// Arbitrary pulse list with times in `[0, tau]`, ordered by time; a
    /// perturbation precedes an echo kick at the same time.
    pub fn explicit(omega: f64, tau: f64, pulses: Vec<Pulse>) -> Result<Self> {
        check_positive(omega, tau)?;
        for q in &pulses {
            if !(q.time >= 0.0 && q.time <= tau) || !q.weight.is_finite() {
                return invalid(format!("pulse {q:?} outside [0, tau] or non-finite"));
            }
        }
        let rank = |k: PulseKind| (k == PulseKind::EchoPi) as u8;
        let ordered = pulses.windows(2).all(|w| {
            w[0].time < w[1].time || (w[0].time == w[1].time && rank(w[0].kind) < rank(w[1].kind))
        });
        if !ordered {
            return invalid("pulses must be time ordered, perturbation before echo at equal times");
        }
        Ok(Self { omega, tau, pulses, params: None })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn params(&self) -> Option<DriveParams> {
        self.params
    }

    pub fn perturbations(&self) -> impl Iterator<Item = &Pulse> {
        self.pulses.iter().filter(|p| p.kind == PulseKind::Perturbation)
    }

    /// True when the echo kicks are odd multiples of `pi` at `tau/4` and `3tau/4`.
    pub fn has_standard_echo(&self) -> bool {
        let echoes: Vec<&Pulse> = self.pulses.iter().filter(|p| p.kind == PulseKind::EchoPi).collect();
        let odd_pi = |w: f64| {
            let k = w / PI;
            (k - k.round()).abs() < 1e-12 && (k.round() as i64).rem_euclid(2) == 1
        };
        echoes.len() == 2
            && (echoes[0].time - self.tau / 4.0).abs() < 1e-12 * self.tau
            && (echoes[1].time - 3.0 * self.tau / 4.0).abs() < 1e-12 * self.tau
            && echoes.iter().all(|p| odd_pi(p.weight))
    }
}

/// Human-readable schedule record: either drive parameters or an explicit pulse list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub omega: f64,
    pub tau: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub echo_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses: Option<Vec<Pulse>>,
}

impl ScheduleConfig {
    pub fn to_schedule(&self) -> Result<PulseSchedule> {
        match &self.pulses {
            Some(list) => {
                if self.epsilon != 0.0 || self.gamma != 0.0 || self.theta != 0.0 {
                    return invalid("give either epsilon/gamma/theta or an explicit pulse list");
                }
                PulseSchedule::explicit(self.omega, self.tau, list.clone())
            }
            None => PulseSchedule::perturbed_with_echo(
                self.omega,
                self.tau,
                DriveParams { epsilon: self.epsilon, gamma: self.gamma, theta: self.theta },
                self.echo_weight.unwrap_or(PI),
            ),
        }
    }
}

/// Maps `t in [0, tau]` onto the rotating-frame time `||t - tau/4| - tau/2| - tau/4`.
pub fn effective_time(t: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) || !(0.0..=tau).contains(&t) {
        return invalid(format!("time {t} outside [0, {tau}]"));
    }
    Ok(((t - tau / 4.0).abs() - tau / 2.0).abs() - tau / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Dense,
    Krylov,
}

#[derive(Debug, Clone)]
enum Engine {
    Dense(Arc<SymmetricEigen>),
    Krylov(Arc<SparseOperator>, Krylov),
}

/// Free evolution under `(Omega/2) H_PXP` plus diagonal detuning kicks.
#[derive(Debug, Clone)]
pub struct Propagator {
    basis: Arc<ConstrainedBasis>,
    number: Vec<f64>,
    engine: Engine,
}

/// Eigendecomposition of `H_PXP` on `basis`, for sharing across propagators.
pub fn pxp_eigen(basis: &ConstrainedBasis) -> Result<Arc<SymmetricEigen>> {
    Ok(Arc::new(SymmetricEigen::new(&build_pxp(basis).to_dense_real()?)?))
}

impl Propagator {
    pub fn dense(basis: Arc<ConstrainedBasis>) -> Result<Self> {
        let eig = pxp_eigen(&basis)?;
        Self::from_eigen(basis, eig)
    }

    pub fn from_eigen(basis: Arc<ConstrainedBasis>, eig: Arc<SymmetricEigen>) -> Result<Self> {
        if eig.dim() != basis.dim() {
            return invalid(format!("eigendecomposition of size {} for dimension {}", eig.dim(), basis.dim()));
        }
        let number = number_diagonal(&basis);
        Ok(Self { basis, number, engine: Engine::Dense(eig) })
    }

    pub fn krylov(basis: Arc<ConstrainedBasis>) -> Self {
        let pxp = Arc::new(build_pxp(&basis));
        let number = number_diagonal(&basis);
        Self { basis, number, engine: Engine::Krylov(pxp, Krylov::default()) }
    }

    pub fn new(basis: Arc<ConstrainedBasis>, backend: Backend) -> Result<Self> {
        match backend {
            Backend::Dense => Self::dense(basis),
            Backend::Krylov => Ok(Self::krylov(basis)),
        }
    }

    pub fn basis(&self) -> &ConstrainedBasis {
        &self.basis
    }

    pub fn backend(&self) -> Backend {
        match self.engine {
            Engine::Dense(_) => Backend::Dense,
            Engine::Krylov(..) => Backend::Krylov,
        }
    }

    pub fn eigen(&self) -> Option<&Arc<SymmetricEigen>> {
        match &self.engine {
            Engine::Dense(e) => Some(e),
            Engine::Krylov(..) => None,
        }
    }

    /// `psi <- exp(-i t (Omega/2) H_PXP) psi`.
    pub fn free(&self, omega: f64, t: f64, psi: &mut [C64]) -> Result<()> {
        if t == 0.0 {
            return Ok(());
        }
        match &self.engine {
            Engine::Dense(eig) => {
                eig.evolve(0.5 * omega * t, psi);
                Ok(())
            }
            Engine::Krylov(op, k) => k.evolve(op.as_ref(), 0.5 * omega * t, psi),
        }
    }

    /// `psi <- exp(i w N) psi`.
    pub fn kick(&self, weight: f64, psi: &mut [C64]) {
        for (z, &n) in psi.iter_mut().zip(&self.number) {
            *z *= C64::from_polar(1.0, weight * n);
        }
    }

    /// Evolves through `[from, to]` of one period, applying pulses with `from < t <= to`
    /// (or `t = 0` when `from = 0`).
    fn segment(&self, schedule: &PulseSchedule, from: f64, to: f64, psi: &mut [C64]) -> Result<()> {
        let mut now = from;
        for p in schedule.pulses() {
            let inside = if from == 0.0 { p.time >= 0.0 } else { p.time > from };
            if inside && p.time <= to {
                self.free(schedule.omega(), p.time - now, psi)?;
                now = p.time;
                self.kick(p.weight, psi);
            }
        }
        self.free(schedule.omega(), to - now, psi)
    }

    pub(crate) fn cycle_in_place(&self, schedule: &PulseSchedule, psi: &mut [C64]) -> Result<()> {
        self.segment(schedule, 0.0, schedule.tau(), psi)
    }

    /// One full period applied to a normalized state.
    pub fn propagate_cycle(&self, state: &StateVector, schedule: &PulseSchedule) -> Result<StateVector> {
        state.check_basis(&self.basis)?;
        if (state.norm() - 1.0).abs() > NORM_TOL {
            return invalid(format!("state norm {} is not 1", state.norm()));
        }
        let mut out = state.clone();
        self.cycle_in_place(schedule, out.amplitudes_mut())?;
        Ok(out)
    }

    /// Dense one-period unitary, built column by column.
    pub fn cycle_unitary(&self, schedule: &PulseSchedule) -> Result<Mat<C64>> {
        let n = self.basis.dim();
        let mut u = Mat::<C64>::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[c] = C64::new(1.0, 0.0);
            self.cycle_in_place(schedule, &mut col)?;
            for (r, z) in col.iter().enumerate() {
                u[(r, c)] = *z;
            }
        }
        Ok(u)
    }

    /// Records `observables` at `t = 0` and after each of `n_cycles` periods.
    /// Every `snapshot_stride` cycles the state itself is kept.
    pub fn stroboscopic_run(
        &self,
        state0: &StateVector,
        schedule: &PulseSchedule,
        n_cycles: usize,
        observables: &[Observable],
        snapshot_stride: Option<usize>,
    ) -> Result<(ObservableSeries, Vec<(f64, StateVector)>)> {
        let mut state = self.propagate_prepare(state0)?;
        let mut series = ObservableSeries::for_observables(observables, self.basis.sites());
        let mut snapshots = Vec::new();
        for n in 0..=n_cycles {
            if n > 0 {
                self.cycle_in_place(schedule, state.amplitudes_mut())?;
            }
            let t = n as f64 * schedule.tau();
            series.record(t, observables, &self.basis, &state)?;
            if snapshot_stride.is_some_and(|s| s > 0 && n % s == 0) {
                snapshots.push((t, state.clone()));
            }
        }
        Ok((series, snapshots))
    }

    /// Samples `observables` at `samples_per_cycle` equally spaced times per period,
    /// both endpoints included; pulses at a sample time are applied before sampling.
    pub fn micromotion_run(
        &self,
        state0: &StateVector,
        schedule: &PulseSchedule,
        samples_per_cycle: usize,
        n_cycles: usize,
        observables: &[Observable],
    ) -> Result<ObservableSeries> {
        if samples_per_cycle < 2 {
            return invalid("samples_per_cycle must be at least 2");
        }
        let mut state = self.propagate_prepare(state0)?;
        let mut series = ObservableSeries::for_observables(observables, self.basis.sites());
        let tau = schedule.tau();
        let steps = samples_per_cycle - 1;
        series.record(0.0, observables, &self.basis, &state)?;
        for n in 0..n_cycles {
            for k in 0..steps {
                let from = tau * k as f64 / steps as f64;
                let to = if k + 1 == steps { tau } else { tau * (k + 1) as f64 / steps as f64 };
                self.segment(schedule, from, to, state.amplitudes_mut())?;
                let t = n as f64 * tau + to;
                series.record(t, observables, &self.basis, &state)?;
            }
        }
        Ok(series)
    }

    fn propagate_prepare(&self, state0: &StateVector) -> Result<StateVector> {
        state0.check_basis(&self.basis)?;
        if (state0.norm() - 1.0).abs() > NORM_TOL {
            return invalid(format!("state norm {} is not 1", state0.norm()));
        }
        Ok(state0.clone())
    }
}
