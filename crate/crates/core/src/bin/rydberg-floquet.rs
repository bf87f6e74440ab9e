use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rydberg_floquet::config::{load_config, validate_config, RunConfig};
use rydberg_floquet::drive::Backend;
use rydberg_floquet::scenarios::{run_scenario, scenario_listing};

#[derive(Parser)]
#[command(name = "rydberg-floquet", version, about = "Driven Rydberg chain experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse a config and report derived quantities and warnings.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the available scenarios.
    ListScenarios,
}

/// Flags that take precedence over config fields.
#[derive(clap::Args)]
struct Overrides {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "dense" => Ok(Backend::Dense),
        "krylov" => Ok(Backend::Krylov),
        _ => Err(format!("unknown backend '{s}' (dense, krylov)")),
    }
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.physics;
        p.sites = self.sites.or(p.sites);
        p.tau = self.tau.or(p.tau);
        p.epsilon = self.epsilon.or(p.epsilon);
        p.gamma = self.gamma.or(p.gamma);
        p.theta = self.theta.or(p.theta);
        cfg.runtime.n_cycles = self.cycles.or(cfg.runtime.n_cycles);
        cfg.runtime.backend = self.backend.or(cfg.runtime.backend);
        cfg.seed = self.seed.or(cfg.seed);
        if let Some(dir) = &self.out {
            cfg.output.directory = Some(dir.clone());
        }
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, ExitCode> {
    match load_config(path) {
        Ok(mut cfg) => {
            overrides.apply(&mut cfg);
            Ok(cfg)
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("usage: rydberg-floquet run <config.json>  (see rydberg-floquet --help)");
            Err(ExitCode::from(2))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            print!("{}", scenario_listing());
            ExitCode::SUCCESS
        }
        Command::Validate { config, overrides } => {
            let cfg = match load(&config, &overrides) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match validate_config(&cfg) {
                Ok(report) => {
                    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                    for w in &report.warnings {
                        eprintln!("warning: {w}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    ExitCode::from(2)
                }
            }
        }
        Command::Run { config, overrides } => {
            let cfg = match load(&config, &overrides) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Err(e) = cfg.resolve() {
                eprintln!("error: {}: {e}", config.display());
                return ExitCode::from(2);
            }
            let dir = cfg.output_dir();
            match run_scenario(&cfg, &dir) {
                Ok(m) => {
                    println!("{} finished in {:.1} s -> {}", m.scenario, m.wall_time_s, dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e} (partial outputs in {})", dir.display());
                    ExitCode::from(1)
                }
            }
        }
    }
}
