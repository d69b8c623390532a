//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ebt_core::montecarlo::SimulationPlan;

use crate::commands::{self, SeedSource};
use crate::config::{ConfigError, ExperimentConfig, Format, SweepConfig};
use crate::{parallel, render};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const SEED_ENV: &str = "EBT_DEFAULT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "ebt",
    version,
    about = "Analyze and simulate extended Bernoulli trials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed and EBT_DEFAULT_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for simulation; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact p, PSP and edge condition.
    Analyze,
    /// Monte Carlo estimate with a binomial test against chance.
    Simulate,
    /// Re-evaluate the experiment for each value of one numeric field.
    Sweep {
        /// Field path, such as `r` or `outcomes[1].success_prob`.
        #[arg(long)]
        param: Option<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Option<Vec<f64>>,
        /// Also simulate every point.
        #[arg(long)]
        simulate: bool,
    },
    /// Randomized checks of the trial theorems.
    VerifyTheorems {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn load(cli: &Cli) -> Result<Option<ExperimentConfig>, Failure> {
    cli.config
        .as_deref()
        .map(ExperimentConfig::load)
        .transpose()
        .map_err(Failure::from)
}

fn require(cfg: Option<ExperimentConfig>) -> Result<ExperimentConfig, Failure> {
    cfg.ok_or_else(|| usage("--config: required for this command"))
}

fn seed(cli: &Cli, cfg: Option<&ExperimentConfig>) -> Result<(u64, SeedSource), Failure> {
    let env = std::env::var(SEED_ENV).ok();
    Ok(commands::resolve_seed(
        cli.seed,
        cfg.and_then(|c| c.simulation.seed),
        env.as_deref(),
    )?)
}

fn workers(cli: &Cli, cfg: Option<&ExperimentConfig>) -> Result<usize, Failure> {
    match cli
        .workers
        .or_else(|| cfg.and_then(|c| c.simulation.workers))
    {
        Some(0) => Err(usage("--workers: must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(parallel::default_workers()),
    }
}

fn emit(cli: &Cli, cfg: Option<&ExperimentConfig>, body: &str) -> Result<(), Failure> {
    let path = cli
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.path.as_ref().map(PathBuf::from)));
    match path {
        Some(p) => {
            std::fs::write(&p, body).map_err(|e| usage(format!("--out: {}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| usage(format!("stdout: {e}")))
        }
    }
}

fn format(cli: &Cli, cfg: Option<&ExperimentConfig>, default: Format) -> Format {
    cli.format
        .or_else(|| cfg.and_then(|c| c.output.format))
        .unwrap_or(default)
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Analyze => {
            let cfg = require(cfg)?;
            let report = commands::analyze(&cfg.build()?)?;
            let body = match format(cli, Some(&cfg), Format::Json) {
                Format::Json => render::json(&report),
                Format::Csv => render::analysis_csv(&report),
                Format::Text => render::analysis_text(&report),
            };
            emit(cli, Some(&cfg), &body)?;
            Ok(EXIT_OK)
        }
        Command::Simulate => {
            let cfg = require(cfg)?;
            let exp = cfg.build()?;
            let (seed, source) = seed(cli, Some(&cfg))?;
            let plan = SimulationPlan::new(cfg.simulation.n, seed, cfg.simulation.partition_size)
                .map_err(|e| usage(format!("simulation: {e}")))?;
            let report = commands::simulate(&exp, &plan, workers(cli, Some(&cfg))?, source);
            let body = match format(cli, Some(&cfg), Format::Json) {
                Format::Json => render::json(&report),
                Format::Csv => render::simulation_csv(&report),
                Format::Text => render::simulation_text(&report),
            };
            emit(cli, Some(&cfg), &body)?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            param,
            values,
            simulate,
        } => {
            let cfg = require(cfg)?;
            cfg.build()?;
            let spec = match (param, values, &cfg.sweep) {
                (Some(param), Some(values), _) => SweepConfig {
                    param: param.clone(),
                    values: values.clone(),
                    simulate: *simulate,
                },
                (None, None, Some(s)) => SweepConfig {
                    simulate: s.simulate || *simulate,
                    ..s.clone()
                },
                (None, None, None) => {
                    return Err(usage(
                        "sweep: give --param and --values or a `sweep` config section",
                    ))
                }
                _ => return Err(usage("sweep: --param and --values go together")),
            };
            let seed = if spec.simulate {
                let (s, source) = seed(cli, Some(&cfg))?;
                if source == SeedSource::Entropy {
                    eprintln!("ebt: no seed given, using {s}");
                }
                Some(s)
            } else {
                None
            };
            let report = commands::sweep(&cfg, &spec, seed, workers(cli, Some(&cfg))?)?;
            let body = match format(cli, Some(&cfg), Format::Csv) {
                Format::Json => render::json(&report),
                Format::Csv => render::sweep_csv(&report),
                Format::Text => render::sweep_text(&report),
            };
            emit(cli, Some(&cfg), &body)?;
            Ok(EXIT_OK)
        }
        Command::VerifyTheorems { instances } => {
            let (seed, source) = seed(cli, cfg.as_ref())?;
            let report = commands::verify_theorems(seed, source, *instances)?;
            let body = match format(cli, cfg.as_ref(), Format::Text) {
                Format::Json => render::json(&report),
                Format::Csv => render::verify_csv(&report),
                Format::Text => render::verify_text(&report),
            };
            emit(cli, cfg.as_ref(), &body)?;
            if report.passed {
                Ok(EXIT_OK)
            } else {
                for s in report.suites.iter().filter(|s| !s.passed) {
                    eprintln!(
                        "ebt: {} violated on {} of {} instances; first: {}",
                        s.name,
                        s.violations,
                        s.instances,
                        serde_json::to_string(&s.first_violation).expect("serializes")
                    );
                }
                Ok(EXIT_VIOLATION)
            }
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("ebt: {}", f.message);
            f.code
        }
    }
}
