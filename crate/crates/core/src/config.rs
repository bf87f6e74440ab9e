//! Run configuration: strict JSON ingestion, per-scenario defaults and validation.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{Boundary, MAX_SITES};
use crate::coherence::T_STAR_DEFAULT;
use crate::drive::Backend;
use crate::effective::{coefficient_report, EffectiveCoefficients};
use crate::error::{Error, Result};

/// Output root used when neither the config nor the command line names a directory.
pub const OUTPUT_ENV: &str = "RYDBERG_FLOQUET_OUTPUT";

/// Largest Hilbert-space dimension the dense backend accepts.
pub const DENSE_MAX_DIM: usize = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    #[serde(rename = "fig2-entanglement")]
    Fig2Entanglement,
    #[serde(rename = "fig1b-micromotion")]
    Fig1bMicromotion,
    #[serde(rename = "fig3a-domainwall")]
    Fig3aDomainwall,
    #[serde(rename = "fig3c-phase-diagram")]
    Fig3cPhaseDiagram,
    #[serde(rename = "figS2-gamma-sweep")]
    FigS2GammaSweep,
    #[serde(rename = "figS3-distances")]
    FigS3Distances,
    #[serde(rename = "fig4-hardware")]
    Fig4Hardware,
    #[serde(rename = "figS4-coherence-sweep")]
    FigS4CoherenceSweep,
    EffectiveReport,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Fig2Entanglement,
        Scenario::Fig1bMicromotion,
        Scenario::Fig3aDomainwall,
        Scenario::Fig3cPhaseDiagram,
        Scenario::FigS2GammaSweep,
        Scenario::FigS3Distances,
        Scenario::Fig4Hardware,
        Scenario::FigS4CoherenceSweep,
        Scenario::EffectiveReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2Entanglement => "fig2-entanglement",
            Scenario::Fig1bMicromotion => "fig1b-micromotion",
            Scenario::Fig3aDomainwall => "fig3a-domainwall",
            Scenario::Fig3cPhaseDiagram => "fig3c-phase-diagram",
            Scenario::FigS2GammaSweep => "figS2-gamma-sweep",
            Scenario::FigS3Distances => "figS3-distances",
            Scenario::Fig4Hardware => "fig4-hardware",
            Scenario::FigS4CoherenceSweep => "figS4-coherence-sweep",
            Scenario::EffectiveReport => "effective-report",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::Fig2Entanglement => "stroboscopic run from Z2: density, order, GHZ fidelity, QFI, correlations",
            Scenario::Fig1bMicromotion => "within-period traces of density and staggered order",
            Scenario::Fig3aDomainwall => "two-wall dispersion, coupling and offset tables; sector check against ED",
            Scenario::Fig3cPhaseDiagram => "Bethe-ansatz K and J/h versus filling",
            Scenario::FigS2GammaSweep => "QFI, populations and order across a gamma grid",
            Scenario::FigS3Distances => "domain-wall distance distribution over time",
            Scenario::Fig4Hardware => "quantum walk: ideal chain against van-der-Waals atoms",
            Scenario::FigS4CoherenceSweep => "h t_c over the (tau, |eps|) grid",
            Scenario::EffectiveReport => "closed-form coefficients and Magnus diagnostics",
        }
    }

    /// Defaults every config field falls back to.
    pub fn defaults(self) -> Resolved {
        let fig2 = Resolved {
            scenario: self,
            sites: 16,
            boundary: Boundary::Periodic,
            omega: 1.0,
            tau: 2.0 * PI / 1.3,
            epsilon: -0.45,
            gamma: 1.0,
            theta: 0.15,
            echo_weight: PI,
            n_cycles: 150,
            samples_per_cycle: 41,
            backend: Backend::Dense,
            snapshot_stride: 10,
            width: 0.046,
            steps_per_width: 24,
            delta_mf: 0.09,
            rb: 1.5,
            t_star: T_STAR_DEFAULT,
            seed: 0,
            sweep: Sweep::default(),
        };
        match self {
            Scenario::Fig2Entanglement | Scenario::FigS3Distances => fig2,
            Scenario::Fig1bMicromotion => Resolved { n_cycles: 3, ..fig2 },
            Scenario::Fig3aDomainwall => Resolved { n_cycles: 0, ..fig2 },
            Scenario::Fig3cPhaseDiagram => Resolved { n_cycles: 0, ..fig2 },
            Scenario::FigS2GammaSweep => Resolved {
                sweep: Sweep { gamma: Some(crate::coherence::linspace(0.5, 1.5, 11)), ..Sweep::default() },
                ..fig2
            },
            Scenario::Fig4Hardware => {
                Resolved { sites: 12, epsilon: 0.45, gamma: -0.9, theta: -0.45, n_cycles: 30, ..fig2 }
            }
            Scenario::FigS4CoherenceSweep => Resolved {
                n_cycles: 0,
                sweep: Sweep {
                    tau: Some(crate::coherence::linspace(2.0, 6.0, 8)),
                    abs_epsilon: Some(crate::coherence::linspace(0.1, 0.6, 8)),
                    ..Sweep::default()
                },
                ..fig2
            },
            Scenario::EffectiveReport => Resolved { sites: 8, n_cycles: 0, ..fig2 },
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub sites: Option<usize>,
    pub boundary: Option<Boundary>,
    pub omega: Option<f64>,
    pub tau: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Runtime {
    pub n_cycles: Option<usize>,
    pub samples_per_cycle: Option<usize>,
    pub backend: Option<Backend>,
    pub snapshot_stride: Option<usize>,
    pub echo_weight: Option<f64>,
    /// Gaussian pulse width as a fraction of `tau`.
    pub width: Option<f64>,
    pub steps_per_width: Option<usize>,
    pub delta_mf: Option<f64>,
    pub rb: Option<f64>,
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_epsilon: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filling: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub directory: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub runtime: Runtime,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A config with every field filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub scenario: Scenario,
    pub sites: usize,
    pub boundary: Boundary,
    pub omega: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub theta: f64,
    pub echo_weight: f64,
    pub n_cycles: usize,
    pub samples_per_cycle: usize,
    pub backend: Backend,
    pub snapshot_stride: usize,
    pub width: f64,
    pub steps_per_width: usize,
    pub delta_mf: f64,
    pub rb: f64,
    pub t_star: f64,
    pub seed: u64,
    pub sweep: Sweep,
}

/// Parses `text`; syntax and schema errors carry `path:line:column`.
pub fn parse_config(text: &str, origin: &Path) -> Result<RunConfig> {
    if text.trim().is_empty() {
        return Err(Error::InvalidArgument(format!("{}: empty config", origin.display())));
    }
    serde_json::from_str(text).map_err(|e| {
        Error::InvalidArgument(format!("{}:{}:{}: {}", origin.display(), e.line(), e.column(), strip_location(&e)))
    })
}

fn strip_location(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    match msg.rfind(" at line ") {
        Some(k) => msg[..k].to_string(),
        None => msg,
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    parse_config(&text, path)
}

/// Number of blockade-legal configurations, without enumerating them.
pub fn constrained_dim(sites: usize, boundary: Boundary) -> u128 {
    // open chains: Fibonacci F(L+2); rings: Lucas L(L)
    let (mut a, mut b): (u128, u128) = (1, 2);
    for _ in 1..sites {
        (a, b) = (b, a + b);
    }
    match boundary {
        Boundary::Open => b,
        Boundary::Periodic => {
            let (mut p, mut q): (u128, u128) = (2, 1);
            for _ in 0..sites {
                (p, q) = (q, p + q);
            }
            p
        }
    }
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved> {
        let d = self.scenario.defaults();
        let p = &self.physics;
        let r = &self.runtime;
        let sweep = match &self.sweep {
            Some(s) => Sweep {
                gamma: s.gamma.clone().or(d.sweep.gamma.clone()),
                tau: s.tau.clone().or(d.sweep.tau.clone()),
                abs_epsilon: s.abs_epsilon.clone().or(d.sweep.abs_epsilon.clone()),
                filling: s.filling.clone().or(d.sweep.filling.clone()),
            },
            None => d.sweep.clone(),
        };
        let out = Resolved {
            scenario: self.scenario,
            sites: p.sites.unwrap_or(d.sites),
            boundary: p.boundary.unwrap_or(d.boundary),
            omega: p.omega.unwrap_or(d.omega),
            tau: p.tau.unwrap_or(d.tau),
            epsilon: p.epsilon.unwrap_or(d.epsilon),
            gamma: p.gamma.unwrap_or(d.gamma),
            theta: p.theta.unwrap_or(d.theta),
            echo_weight: r.echo_weight.unwrap_or(d.echo_weight),
            n_cycles: r.n_cycles.unwrap_or(d.n_cycles),
            samples_per_cycle: r.samples_per_cycle.unwrap_or(d.samples_per_cycle),
            backend: r.backend.unwrap_or(d.backend),
            snapshot_stride: r.snapshot_stride.unwrap_or(d.snapshot_stride),
            width: r.width.unwrap_or(d.width),
            steps_per_width: r.steps_per_width.unwrap_or(d.steps_per_width),
            delta_mf: r.delta_mf.unwrap_or(d.delta_mf),
            rb: r.rb.unwrap_or(d.rb),
            t_star: r.t_star.unwrap_or(d.t_star),
            seed: self.seed.unwrap_or(d.seed),
            sweep,
        };
        out.validate()?;
        Ok(out)
    }

    /// Output directory: config field, else `$RYDBERG_FLOQUET_OUTPUT/<scenario>`, else `runs/<scenario>`.
    pub fn output_dir(&self) -> PathBuf {
        match &self.output.directory {
            Some(d) => d.clone(),
            None => {
                let root = std::env::var_os(OUTPUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"));
                root.join(self.scenario.name())
            }
        }
    }

    pub fn formats(&self) -> Vec<Format> {
        self.output.formats.clone().unwrap_or_else(|| vec![Format::Csv, Format::Json])
    }
}

impl Resolved {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let finite = [self.omega, self.tau, self.epsilon, self.gamma, self.theta, self.echo_weight, self.delta_mf];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("physics parameters must be finite".into());
        }
        if !(2..=MAX_SITES).contains(&self.sites) {
            return bad(format!("sites = {} outside 2..={MAX_SITES}", self.sites));
        }
        if self.omega <= 0.0 || self.tau <= 0.0 {
            return bad("omega and tau must be positive".into());
        }
        if self.backend == Backend::Dense && self.dim() > DENSE_MAX_DIM as u128 {
            return bad(format!(
                "dense backend limited to dimension {DENSE_MAX_DIM}; L = {} has {}, use \"backend\": \"krylov\"",
                self.sites,
                self.dim()
            ));
        }
        if self.samples_per_cycle < 2 {
            return bad("samples_per_cycle must be at least 2".into());
        }
        if !(self.width > 0.0) || self.steps_per_width < 20 {
            return bad("width must be positive and steps_per_width at least 20".into());
        }
        if !(self.rb > 0.0) || !(self.t_star > 0.0) {
            return bad("rb and t_star must be positive".into());
        }
        let needs_even = matches!(self.scenario, Scenario::Fig2Entanglement | Scenario::FigS3Distances);
        if needs_even && (self.sites % 2 == 1 || self.boundary != Boundary::Periodic) {
            return bad(format!("{} needs an even periodic chain", self.scenario));
        }
        if self.scenario == Scenario::Fig4Hardware && self.sites > crate::hardware::MAX_VDW_SITES {
            return bad(format!("hardware model limited to {} sites", crate::hardware::MAX_VDW_SITES));
        }
        for (name, grid) in [
            ("gamma", &self.sweep.gamma),
            ("tau", &self.sweep.tau),
            ("abs_epsilon", &self.sweep.abs_epsilon),
            ("filling", &self.sweep.filling),
        ] {
            if grid.as_ref().is_some_and(|g| g.is_empty() || g.iter().any(|x| !x.is_finite())) {
                return bad(format!("sweep.{name} must be a nonempty list of finite numbers"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> u128 {
        constrained_dim(self.sites, self.boundary)
    }

    pub fn coefficients(&self) -> EffectiveCoefficients {
        crate::effective::closed_form_coefficients(self.omega, self.tau, self.epsilon, self.gamma, self.theta)
    }
}

/// What `validate` prints.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub resolved: Resolved,
    pub dim: u128,
    pub coefficients: EffectiveCoefficients,
    pub memory_bytes: u128,
    pub warnings: Vec<String>,
    /// One entry per sweep point, where the scenario sweeps a drive parameter.
    pub expanded: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub coefficients: EffectiveCoefficients,
}

/// Parses, resolves and inspects a config without running it. Sizes beyond
/// the backend's reach are reported as warnings rather than errors.
pub fn validate_config(cfg: &RunConfig) -> Result<ValidationReport> {
    let mut relaxed = cfg.clone();
    let dense_too_big = {
        let d = cfg.scenario.defaults();
        let sites = cfg.physics.sites.unwrap_or(d.sites);
        let bc = cfg.physics.boundary.unwrap_or(d.boundary);
        cfg.runtime.backend.unwrap_or(d.backend) == Backend::Dense && constrained_dim(sites, bc) > DENSE_MAX_DIM as u128
    };
    if dense_too_big {
        relaxed.runtime.backend = Some(Backend::Krylov);
    }
    let sites_too_big = cfg.physics.sites.is_some_and(|l| l > MAX_SITES);
    if sites_too_big {
        relaxed.physics.sites = Some(MAX_SITES);
    }
    let mut resolved = relaxed.resolve()?;
    let mut warnings = Vec::new();
    if sites_too_big {
        resolved.sites = cfg.physics.sites.unwrap_or(resolved.sites);
        warnings.push(format!("L = {} exceeds the largest supported chain L = {MAX_SITES}", resolved.sites));
    }
    let dim = resolved.dim();
    if dense_too_big {
        resolved.backend = cfg.runtime.backend.unwrap_or(Backend::Dense);
        warnings.push(format!(
            "dimension {dim} is too large for the dense backend (limit {DENSE_MAX_DIM}); backend must switch to krylov"
        ));
    }
    let report = coefficient_report(resolved.omega, resolved.tau, resolved.epsilon, resolved.gamma, resolved.theta);
    warnings.extend(report.warnings);
    let memory_bytes = match resolved.backend {
        Backend::Dense => dim * dim * 8 * 2 + dim * 16 * 4,
        Backend::Krylov => dim * 16 * 44 + dim * 16 * 6,
    };
    let point = |gamma: f64, tau: f64, epsilon: f64, theta: f64| SweepPoint {
        gamma,
        tau,
        epsilon,
        theta,
        coefficients: crate::effective::closed_form_coefficients(resolved.omega, tau, epsilon, gamma, theta),
    };
    let expanded = match resolved.scenario {
        Scenario::FigS2GammaSweep => resolved
            .sweep
            .gamma
            .iter()
            .flatten()
            .map(|&g| point(g, resolved.tau, resolved.epsilon, resolved.theta))
            .collect(),
        Scenario::FigS4CoherenceSweep => {
            let taus = resolved.sweep.tau.clone().unwrap_or_default();
            let eps = resolved.sweep.abs_epsilon.clone().unwrap_or_default();
            taus.iter().flat_map(|&t| eps.iter().map(move |&e| (t, e))).map(|(t, e)| point(2.0 * e, t, -e, e)).collect()
        }
        _ => Vec::new(),
    };
    Ok(ValidationReport { coefficients: report.coefficients, resolved, dim, memory_bytes, warnings, expanded })
}
