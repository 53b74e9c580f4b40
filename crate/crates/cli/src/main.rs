//! `jacobi`: command-line front end for `jacobi-core`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod apply;
mod builtin;
mod error;
mod expfile;
mod output;
mod params;
mod probe;
mod tables;
mod verify;

use error::CliError;

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 20_250_101;

#[derive(Parser, Serialize, Debug)]
#[command(
    name = "jacobi",
    version,
    about = "Jacobi expansions: semigroups, Riesz transforms, square functions"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Comma-separated α_i; one value is repeated in every coordinate.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<String>,
    /// Comma-separated β_i; one value is repeated in every coordinate.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Vec<String>,
    /// Dimension, or a list of dimensions for sweeps and corpus suites.
    #[arg(long, global = true, value_delimiter = ',')]
    pub dim: Vec<usize>,
    /// Degree cap N (componentwise), or the kernel truncation degree K.
    #[arg(long, global = true)]
    pub degree: Option<u32>,
    /// Time value(s).
    #[arg(long = "t", global = true, value_delimiter = ',')]
    pub t: Vec<f64>,
    /// Exponent(s) p for norm probes.
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Mesh points per coordinate; one value per coordinate or one for all.
    #[arg(long, global = true, value_delimiter = ',')]
    pub grid: Vec<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format; tables default to csv, expansions and reports to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file, written atomically. Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Kernel suite: succeed only if a violation of the kernel bound is observed.
    #[arg(long, global = true)]
    pub expect_violation: bool,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Build an expansion from a builtin spec: `mode k=(1,0)`, `"poly 1@1,1 -2@0,2"`,
    /// `bump c=(0.2) r=0.5`, `constant v=3`, or `file PATH`.
    Expand {
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
    /// Apply an operator to an expansion file (`-` reads standard input).
    Apply { op: String, input: PathBuf },
    /// Run a verification suite; the JSON report is always written.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Heat or modified heat kernel on a tensor mesh: `heat` or `modified-i`.
    Kernels {
        #[arg(default_value = "heat")]
        variant: String,
    },
    /// Square function of an expansion file on a mesh: `g`, `g-vertical` or `g-tilde-i`.
    Gfun {
        input: PathBuf,
        #[arg(long, default_value = "g")]
        variant: String,
    },
    /// Empirical L^p ratios over random inputs.
    Normprobe { op: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exact,
    Numeric,
    Kernels,
    Energy,
    Domination,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("JACOBI_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "JACOBI_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cfg: &RunConfig) -> Result<(), CliError> {
    init_threads()?;
    match &cfg.command {
        Command::Expand { spec } => builtin::cmd_expand(cfg, spec),
        Command::Apply { op, input } => apply::cmd_apply(cfg, op, input),
        Command::Verify { suite } => verify::cmd_verify(cfg, *suite),
        Command::Kernels { variant } => tables::cmd_kernels(cfg, variant),
        Command::Gfun { input, variant } => tables::cmd_gfun(cfg, input, variant),
        Command::Normprobe { op } => probe::cmd_normprobe(cfg, op),
    }
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jacobi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
