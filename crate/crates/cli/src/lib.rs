//! Command-line front end for `monopole-core`.
//!
//! Every run is described by a [`RunConfig`]: a command with typed
//! parameters, an output format and a seed. [`parse_config`] builds one from
//! command-line arguments merged over an optional flat `key = value` file,
//! and [`run`] dispatches it and renders the artifact.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::parse_ini;
pub use output::{Artifact, Check, Metadata};

use monopole_core::potentials::Vec3;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "MONOPOLE_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Module(#[from] monopole_core::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage errors, 1 for module errors and violated invariants, 0
    /// for `--help` and `--version`.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Clap(e) => {
                if e.use_stderr() {
                    2
                } else {
                    0
                }
            }
            CliError::Module(_) | CliError::Invariant(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "monopole-lab", version, about = "Numerical experiments with the chiral-gauge monopole")]
struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Seed of the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Integrate one charge in the field of a pole.
    Trajectory(TrajectoryArgs),
    /// Birkeland focusing of a parallel beam.
    Beam(BeamArgs),
    /// P, T, C and gauge invariance of manufactured solutions.
    SymmetryAudit(AuditArgs),
    /// Tabulate angular eigenfunctions and their eigen-residuals.
    Harmonics(HarmonicsArgs),
    /// Plane-wave dispersion of the nonlinear equations.
    Dispersion(DispersionArgs),
    /// Monopole gauges and duality invariance of Maxwell's equations.
    PotentialsCheck(PotentialsArgs),
    /// Bilinear, curvature and torsion identities on random spinors.
    Identities(IdentitiesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Trajectory(_) => "trajectory",
            Command::Beam(_) => "beam",
            Command::SymmetryAudit(_) => "symmetry-audit",
            Command::Harmonics(_) => "harmonics",
            Command::Dispersion(_) => "dispersion",
            Command::PotentialsCheck(_) => "potentials-check",
            Command::Identities(_) => "identities",
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Command::SymmetryAudit(_) => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Hand {
    Left,
    Right,
}

impl From<Hand> for monopole_core::classical::Handedness {
    fn from(h: Hand) -> Self {
        match h {
            Hand::Left => Self::Left,
            Hand::Right => Self::Right,
        }
    }
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_vec3, default_value = "1,0,0", allow_hyphen_values = true)]
    pub r0: Vec3,
    #[arg(long, value_parser = parse_vec3, default_value = "0,1,0", allow_hyphen_values = true)]
    pub v0: Vec3,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Hand::Left)]
    pub hand: Hand,
    /// Integrator name (`dopri5`, `rk4`).
    #[arg(long, default_value = "dopri5")]
    pub integrator: String,
    /// Step of fixed-step integrators.
    #[arg(long)]
    pub h: Option<f64>,
    /// Largest accepted relative drift of |v| and of the first integral.
    #[arg(long, default_value_t = 1e-6)]
    pub drift_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct BeamArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub spread: f64,
    #[arg(long, default_value_t = -10.0)]
    pub z0: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Hand::Left)]
    pub hand: Hand,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct AuditArgs {
    /// Magnetic charge of the manufactured solutions.
    #[arg(long, default_value_t = 0.7)]
    pub g: f64,
    /// Sample points per certificate.
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Random spinors for the bilinear transformation table.
    #[arg(long, default_value_t = 1000)]
    pub spinors: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct HarmonicsArgs {
    #[arg(long)]
    pub j: f64,
    /// Dirac number `D = m'`; every admissible value when absent.
    #[arg(long)]
    pub m_prime: Option<f64>,
    /// Every admissible value when absent.
    #[arg(long)]
    pub m: Option<f64>,
    /// Polar nodes; the smallest adequate grid when absent.
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    CoPhase,
    AntiPhase,
}

impl From<ModeArg> for monopole_core::nonlinear::WaveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::CoPhase => Self::CoPhase,
            ModeArg::AntiPhase => Self::AntiPhase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct DispersionArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long)]
    pub kappa0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub k_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 300)]
    pub k_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct PotentialsArgs {
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Pole strength.
    #[arg(long, default_value_t = 1.0)]
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct IdentitiesArgs {
    #[arg(long, default_value_t = 1000)]
    pub spinors: usize,
    /// Curvature constant.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
}

impl RunConfig {
    /// The configuration echoed into every artifact. The output path is left
    /// out so that the same run written to two places is byte-identical.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(&self.command).expect("arguments serialize");
        if let Some(map) = v.as_object_mut() {
            map.insert("format".into(), serde_json::to_value(self.format).expect("format serializes"));
            map.insert("seed".into(), self.seed.into());
        }
        v
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            tool: "monopole-lab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.name().into(),
            seed: self.seed,
            config: self.echo(),
        }
    }
}

fn clap_command() -> clap::Command {
    Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true).allow_negative_numbers(true))
}

/// Builds a [`RunConfig`] from the argument list (program name first). A
/// `--config` file in the arguments, or `config_file` when given, supplies
/// defaults that flags override.
pub fn parse_config<I, S>(args: I, config_file: Option<&std::path::Path>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cmd = clap_command();
    let file = match config_file.map(std::path::Path::to_path_buf).or_else(|| config::config_path(&args)) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
            parse_ini(&text)?
        }
        None => Vec::new(),
    };
    let merged = config::merge_args(&cmd, &args, &file)?;
    let matches = cmd.try_get_matches_from(merged)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let cfg = RunConfig {
        command: cli.command,
        output: cli.output,
        format,
        seed: cli.seed,
    };
    commands::validate(&cfg)?;
    Ok(cfg)
}

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifact: Artifact,
    /// One-line summary of the key residuals.
    pub summary: String,
    /// Failed invariant checks; empty on success.
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Dispatches the command and renders its artifact. Nothing is written.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    commands::dispatch(config)
}

/// Sizes the global worker pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}

/// Parses, runs and writes; returns the process exit status.
pub fn execute<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let result = init_threads()
        .and_then(|_| parse_config(args, None))
        .and_then(|cfg| {
            let outcome = run(&cfg)?;
            let text = outcome.artifact.render();
            match &cfg.output {
                Some(path) => {
                    std::fs::write(path, text)?;
                    println!("{}", outcome.summary);
                }
                None => {
                    // A closed pipe (`| head`) is not an error.
                    let mut out = std::io::stdout().lock();
                    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                        _ => {}
                    }
                    eprintln!("{}", outcome.summary);
                }
            }
            for v in &outcome.violations {
                eprintln!("invariant violated: {v}");
            }
            Ok(outcome.exit_code())
        });
    match result {
        Ok(code) => code,
        Err(e @ CliError::Clap(_)) => {
            if let CliError::Clap(inner) = &e {
                let _ = inner.print();
            }
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
