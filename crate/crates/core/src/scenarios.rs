//! Named experiment runners; each writes CSV/JSON artifacts plus `manifest.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::basis::{Boundary, ConstrainedBasis};
use crate::bethe::{phase_diagram, BetheSettings, K_THRESHOLDS};
use crate::coherence::{linspace, sweep_coherence, FitSettings};
use crate::config::{Format, Resolved, RunConfig, Scenario};
use crate::domainwall::{dispersion_table, validate_two_dw_sector, PairBoundary};
use crate::drive::{pxp_eigen, Backend, DriveParams, Propagator, PulseSchedule};
use crate::effective::{assemble_hf, coefficient_report, floquet_hamiltonian, MagnusContext};
use crate::error::{Error, Result};
use crate::hardware::{heatmap_csv, quantum_walk_benchmark, BenchmarkConfig, Integrator};
use crate::observables::{
    connected_zz, correlations_csv, domainwall_distance_distribution, fmt_f64, Observable, StateVector,
};
use crate::operators::{build_number, build_pxp, build_pxyp, build_ziz};

/// Files written so far, relative to the run directory.
#[derive(Debug, Default)]
pub struct Artifacts {
    dir: PathBuf,
    formats: Vec<Format>,
    files: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path, formats: Vec<Format>) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), formats, files: Vec::new() })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn csv(&mut self, name: &str, text: &str) -> Result<()> {
        if self.formats.contains(&Format::Csv) {
            fs::write(self.dir.join(name), text)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.formats.contains(&Format::Json) {
            fs::write(self.dir.join(name), serde_json::to_string_pretty(value)?)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub status: String,
    pub partial: bool,
    pub error: Option<String>,
    pub files: Vec<String>,
    pub config: RunConfig,
    pub resolved: Resolved,
    pub version: String,
    pub wall_time_s: f64,
}

/// Runs the scenario into `dir` and always writes a manifest, even on failure.
pub fn run_scenario(cfg: &RunConfig, dir: &Path) -> Result<Manifest> {
    let resolved = cfg.resolve()?;
    let mut out = Artifacts::new(dir, cfg.formats())?;
    let start = Instant::now();
    let result = dispatch(&resolved, &mut out);
    let manifest = Manifest {
        scenario: resolved.scenario.name().to_string(),
        status: if result.is_ok() { "ok".into() } else { "failed".into() },
        partial: result.is_err(),
        error: result.as_ref().err().map(|e| e.to_string()),
        files: out.files().to_vec(),
        config: cfg.clone(),
        resolved,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    result.map(|_| manifest)
}

fn dispatch(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    match r.scenario {
        Scenario::Fig2Entanglement => fig2(r, out),
        Scenario::Fig1bMicromotion => micromotion(r, out),
        Scenario::Fig3aDomainwall => domainwall(r, out),
        Scenario::Fig3cPhaseDiagram => phases(r, out),
        Scenario::FigS2GammaSweep => gamma_sweep(r, out),
        Scenario::FigS3Distances => distances(r, out),
        Scenario::Fig4Hardware => hardware(r, out),
        Scenario::FigS4CoherenceSweep => coherence(r, out),
        Scenario::EffectiveReport => effective(r, out),
    }
}

fn basis_of(r: &Resolved) -> Result<Arc<ConstrainedBasis>> {
    Ok(Arc::new(ConstrainedBasis::new(r.sites, r.boundary)?))
}

fn params_of(r: &Resolved) -> DriveParams {
    DriveParams { epsilon: r.epsilon, gamma: r.gamma, theta: r.theta }
}

fn schedule_of(r: &Resolved) -> Result<PulseSchedule> {
    PulseSchedule::perturbed_with_echo(r.omega, r.tau, params_of(r), r.echo_weight)
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b })
}

fn fig2(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let basis = basis_of(r)?;
    let prop = Propagator::new(basis.clone(), r.backend)?;
    let schedule = schedule_of(r)?;
    let observables = [
        Observable::Density,
        Observable::StaggeredMagnetization,
        Observable::GhzFidelity,
        Observable::QfiDensity,
        Observable::Z2Populations,
    ];
    let z2 = StateVector::z2(&basis)?;
    let (series, snaps) = prop.stroboscopic_run(&z2, &schedule, r.n_cycles, &observables, Some(r.snapshot_stride))?;
    out.csv("observables.csv", &series.to_csv())?;
    out.json("observables.json", &series)?;
    let corr: Vec<(f64, Vec<Vec<f64>>)> = snaps.iter().map(|(t, s)| (*t, connected_zz(&basis, s))).collect();
    out.csv("correlations.csv", &correlations_csv(&corr))?;
    let ghz = series.column("ghz_fidelity").unwrap_or_default();
    let qfi = series.column("qfi_density").unwrap_or_default();
    let (ghz_cycle, ghz_max) = argmax(ghz);
    let (qfi_cycle, qfi_max) = argmax(qfi);
    out.json(
        "summary.json",
        &json!({
            "dim": basis.dim(),
            "coefficients": r.coefficients(),
            "ghz_peak": {"cycle": ghz_cycle, "value": ghz_max},
            "qfi_peak": {"cycle": qfi_cycle, "value": qfi_max},
        }),
    )
}

fn micromotion(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let basis = basis_of(r)?;
    let prop = Propagator::new(basis.clone(), r.backend)?;
    let z2 = StateVector::z2(&basis)?;
    let series = prop.micromotion_run(
        &z2,
        &schedule_of(r)?,
        r.samples_per_cycle,
        r.n_cycles,
        &[Observable::Density, Observable::StaggeredMagnetization],
    )?;
    out.csv("micromotion.csv", &series.to_csv())?;
    out.json("micromotion.json", &series)
}

fn domainwall(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let c = r.coefficients();
    let bc = match r.boundary {
        Boundary::Periodic => PairBoundary::Periodic,
        Boundary::Open => PairBoundary::Open,
    };
    let rows = dispersion_table(201, c.h, c.j, c.g, bc);
    let mut csv = String::from("k,dispersion,delta,lambda_re,lambda_im,lambda_abs\n");
    for row in &rows {
        let vals = [row.k, row.dispersion, row.delta, row.lambda_re, row.lambda_im, row.lambda_abs];
        csv.push_str(&vals.map(fmt_f64).join(","));
        csv.push('\n');
    }
    out.csv("dispersion.csv", &csv)?;
    out.json("dispersion.json", &rows)?;
    if r.boundary == Boundary::Periodic && r.sites % 2 == 0 {
        let report = validate_two_dw_sector(r.sites, c.h, c.j)?;
        out.json("two_wall.json", &report)?;
    }
    Ok(())
}

fn phases(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let grid = r.sweep.filling.clone().unwrap_or_else(|| linspace(0.001, 0.4999, 100));
    let rows = phase_diagram(&grid, 1.0, BetheSettings::default())?;
    let mut csv = String::from("n0,u0,K,J_over_h,energy\n");
    for row in &rows {
        csv.push_str(&[row.n0, row.u0, row.k, row.j_over_h, row.energy].map(fmt_f64).join(","));
        csv.push('\n');
    }
    out.csv("phase_diagram.csv", &csv)?;
    out.json("phase_diagram.json", &json!({"rows": rows, "k_thresholds": K_THRESHOLDS}))
}

fn gamma_sweep(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let basis = basis_of(r)?;
    let prop = Propagator::new(basis.clone(), r.backend)?;
    let z2 = StateVector::z2(&basis)?;
    let gammas = r.sweep.gamma.clone().unwrap_or_default();
    let observables = [Observable::QfiDensity, Observable::Z2Populations, Observable::StaggeredMagnetization];
    let mut series_csv = String::from("gamma,t,qfi_density,p_z2,p_z2_prime,staggered_magnetization\n");
    let mut summary_csv = String::from("gamma,J,h,g,detuning_ratio,resonant,qfi_max,qfi_peak_t\n");
    let mut summary = Vec::new();
    for &gamma in &gammas {
        let params = DriveParams { gamma, ..params_of(r) };
        let schedule = PulseSchedule::perturbed_with_echo(r.omega, r.tau, params, r.echo_weight)?;
        let (series, _) = prop.stroboscopic_run(&z2, &schedule, r.n_cycles, &observables, None)?;
        for (k, t) in series.times.iter().enumerate() {
            let row: Vec<String> = std::iter::once(gamma)
                .chain(std::iter::once(*t))
                .chain(series.columns.iter().map(|c| c[k]))
                .map(fmt_f64)
                .collect();
            series_csv.push_str(&row.join(","));
            series_csv.push('\n');
        }
        let c = crate::effective::closed_form_coefficients(r.omega, r.tau, r.epsilon, gamma, r.theta);
        let ratio = (c.j - 2.0 * c.h) / (4.0 * c.h);
        let qfi = series.column("qfi_density").unwrap_or_default();
        let (k, qmax) = argmax(qfi);
        let _ = writeln!(
            summary_csv,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(gamma),
            fmt_f64(c.j),
            fmt_f64(c.h),
            fmt_f64(c.g),
            fmt_f64(ratio),
            u8::from(ratio.abs() < 1.0),
            fmt_f64(qmax),
            fmt_f64(series.times[k])
        );
        summary.push(json!({"gamma": gamma, "coefficients": c, "detuning_ratio": ratio, "qfi_max": qmax, "qfi_peak_t": series.times[k]}));
    }
    out.csv("gamma_series.csv", &series_csv)?;
    out.csv("gamma_summary.csv", &summary_csv)?;
    out.json("gamma_summary.json", &summary)
}

fn distances(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let basis = basis_of(r)?;
    let prop = Propagator::new(basis.clone(), r.backend)?;
    let z2 = StateVector::z2(&basis)?;
    let (_, snaps) = prop.stroboscopic_run(&z2, &schedule_of(r)?, r.n_cycles, &[], Some(r.snapshot_stride))?;
    let mut csv = String::from("t,l,probability\n");
    for (t, s) in &snaps {
        // snapshots without any wall pair (Z2 itself) get an all-zero row
        let dist = domainwall_distance_distribution(&basis, s)?.unwrap_or_else(|| vec![0.0; basis.sites() - 1]);
        for (i, p) in dist.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", fmt_f64(*t), i + 1, fmt_f64(*p));
        }
    }
    out.csv("distances.csv", &csv)
}

fn hardware(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    if (r.gamma + 2.0 * r.epsilon).abs() > 1e-12 || (r.theta + r.epsilon).abs() > 1e-12 {
        return Err(Error::InvalidArgument("fig4-hardware needs gamma = -2 epsilon and theta = -epsilon".into()));
    }
    let cfg = BenchmarkConfig {
        sites: r.sites,
        omega: r.omega,
        tau: r.tau,
        epsilon: r.epsilon,
        rb: r.rb,
        width_fraction: r.width,
        delta_mf: r.delta_mf,
        n_cycles: r.n_cycles,
        steps_per_width: r.steps_per_width,
        integrator: Integrator::Magnus4,
        tol: 1e-6,
    };
    let result = quantum_walk_benchmark(&cfg)?;
    out.csv("heatmap.csv", &heatmap_csv(&result))?;
    out.json("benchmark.json", &result)
}

fn coherence(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let taus = r.sweep.tau.clone().unwrap_or_default();
    let eps = r.sweep.abs_epsilon.clone().unwrap_or_default();
    let sweep = sweep_coherence(&taus, &eps, r.sites, r.omega, r.t_star, FitSettings::default())?;
    out.csv("coherence.csv", &sweep.to_csv())?;
    out.json("coherence.json", &sweep)
}

/// Least-squares `(c_I, -J, -h, g, h/4)` of `h` on `(1, N, PXYP, PXP, ZIZ)` in the Frobenius inner product.
pub fn project_coefficients(basis: &ConstrainedBasis, h: &Mat<C64>) -> Result<Value> {
    let n = basis.dim();
    let ops = [
        Mat::<C64>::identity(n, n),
        build_number(basis).to_dense(),
        build_pxyp(basis).to_dense(),
        build_pxp(basis).to_dense(),
        build_ziz(basis).to_dense(),
    ];
    let dot = |a: &Mat<C64>, b: &Mat<C64>| -> f64 {
        let mut s = C64::new(0.0, 0.0);
        for c in 0..n {
            for r in 0..n {
                s += a[(r, c)].conj() * b[(r, c)];
            }
        }
        s.re
    };
    let gram = Mat::from_fn(5, 5, |i, j| dot(&ops[i], &ops[j]));
    let rhs = Mat::from_fn(5, 1, |i, _| dot(&ops[i], h));
    use faer::linalg::solvers::Solve;
    let x = gram.partial_piv_lu().solve(&rhs);
    if (0..5).any(|i| !x[(i, 0)].is_finite()) {
        return Err(Error::Singular("operator Gram matrix".into()));
    }
    Ok(json!({
        "identity": x[(0, 0)],
        "j": -x[(1, 0)],
        "h": -x[(2, 0)],
        "g": x[(3, 0)],
        "ziz_over_h": x[(4, 0)] / -x[(2, 0)],
    }))
}

fn effective(r: &Resolved, out: &mut Artifacts) -> Result<()> {
    let report = coefficient_report(r.omega, r.tau, r.epsilon, r.gamma, r.theta);
    out.json("coefficients.json", &report)?;
    if r.dim() > crate::config::DENSE_MAX_DIM as u128 / 2 {
        return Ok(());
    }
    let basis = basis_of(r)?;
    let eig = pxp_eigen(&basis)?;
    let prop = Propagator::from_eigen(basis.clone(), eig.clone())?;
    let schedule = schedule_of(r)?;
    let exact = floquet_hamiltonian(&prop.cycle_unitary(&schedule)?, r.tau)?;
    let ctx = MagnusContext::from_eigen(&basis, eig)?;
    let mut magnus = Vec::new();
    for order in 0..=1 {
        let hf = ctx.magnus_hf(&schedule, order)?;
        magnus.push(json!({"order": order, "distance": (&exact - &hf).norm_l2()}));
    }
    let closed = assemble_hf(r.coefficients(), &basis)?.to_dense();
    let diagnostics = json!({
        "sites": r.sites,
        "dim": basis.dim(),
        "backend": Backend::Dense,
        "exact_norm": exact.norm_l2(),
        "magnus": magnus,
        "closed_form_distance": (&exact - &closed).norm_l2(),
        "projected": project_coefficients(&basis, &exact)?,
        "closed_form": r.coefficients(),
    });
    out.json("magnus.json", &diagnostics)
}

/// Lines for `list-scenarios`.
pub fn scenario_listing() -> String {
    Scenario::ALL.iter().map(|s| format!("{:<24}{}\n", s.name(), s.summary())).collect()
}
