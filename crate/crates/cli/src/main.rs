use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ringlab_core::TransformKind;

mod commands;
mod convert;

#[derive(Parser, Debug)]
#[command(name = "ringlab", version, about = "Free-probability transforms and single-ring spectra")]
struct Cli {
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file whose keys override the command's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Converts a series between moments, cumulants, R, S, A, K, G and B.
    Transform(TransformArgs),
    /// Tabulates F, rho and O for a single-ring ensemble.
    Ring(RingArgs),
    /// Samples an ensemble and compares against its analytic profile.
    Mc(McArgs),
    /// Runs the identity and property checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TransformArgs {
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    /// Input JSON: `{"kind", "coeffs"}` or a bare list of real coefficients.
    /// `-` reads stdin.
    #[arg(long, default_value = "-")]
    pub input: String,
    /// Output order; a shorter input is padded with zero coefficients. Defaults to the input order, at least 16.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleArgs {
    /// ginibre, haar, product, poisson or commutator.
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// S-transform series file, used instead of a named ensemble.
    #[arg(long)]
    pub s_series: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct McArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, env = "RINGLAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.02)]
    pub ks_tol: f64,
    #[arg(long, default_value_t = 0.1)]
    pub overlap_tol: f64,
    #[arg(long, default_value_t = 2)]
    pub margin_bins: usize,
    #[arg(long)]
    pub radius_tol: Option<f64>,
    /// Hermitian checks: sup-norm tolerance on the density.
    #[arg(long, default_value_t = 0.05)]
    pub density_tol: f64,
    /// Hermitian checks: tolerance on the second moment.
    #[arg(long, default_value_t = 0.05)]
    pub moment_tol: f64,
    /// Compares against this ensemble's profile instead of the sampled one.
    #[arg(long)]
    pub against: Option<String>,
    /// For Ginibre, samples `X + X^dagger` instead.
    #[arg(long, default_value_t = false)]
    pub hermitian_part: bool,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory receiving one eigenvalue/overlap CSV per sample.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    /// Defaults to 1e-9, or 1e-8 above order 16.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Determining-sequence file to include in the round-trip checks.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(ringlab_core::Error),
    Tolerance(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) if e.is_precondition() => 2,
            CliError::Core(_) => 3,
            CliError::Tolerance(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Tolerance(m) => write!(f, "tolerance failure: {m}"),
        }
    }
}

impl From<ringlab_core::Error> for CliError {
    fn from(e: ringlab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Overlays the keys of the config file on the parsed flags.
fn merge_config<T: Serialize + DeserializeOwned>(args: T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else { return Ok(args) };
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let overlay: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let serde_json::Value::Object(overlay) = overlay else {
        return Err(CliError::Input("config must be a JSON object".into()));
    };
    let mut base = serde_json::to_value(args).expect("arguments serialize");
    let obj = base.as_object_mut().expect("arguments are a struct");
    for (k, v) in overlay {
        if !obj.contains_key(&k) {
            return Err(CliError::Input(format!("unknown config key {k:?}")));
        }
        obj.insert(k, v);
    }
    serde_json::from_value(base).map_err(|e| CliError::Input(format!("config: {e}")))
}

pub fn parse_kind(s: &str) -> CliResult<TransformKind> {
    s.parse().map_err(|e: ringlab_core::Error| CliError::Input(e.to_string()))
}

/// Writes to the file, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    let config = cli.config.as_deref();
    match cli.command {
        Command::Transform(a) => commands::transform(&merge_config(a, config)?),
        Command::Ring(a) => commands::ring(&merge_config(a, config)?),
        Command::Mc(a) => commands::mc(&merge_config(a, config)?),
        Command::Verify(a) => commands::verify(&merge_config(a, config)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ringlab: {e}");
            ExitCode::from(e.code())
        }
    }
}
