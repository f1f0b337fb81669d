//! Command-line and config-file options.
//!
//! Every option is optional at parse time so that explicitly passed flags can
//! be told apart from absent ones: values resolve as flag, then config file,
//! then the built-in default quoted in each help string.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{usage, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qdrift-lab", version, about = "Resource estimation, bound verification and trajectory sampling for qDRIFT")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// RNG seed [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sampling and sweeps [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Emit JSON instead of CSV
    #[arg(long, global = true)]
    pub json: bool,
    /// JSON config file; explicit flags take precedence over its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the table to PATH instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Step counts of the original and tightened bounds over a time sweep
    Estimate(EstimateArgs),
    /// Dense check of the error bound against exact evolution
    Verify(VerifyArgs),
    /// Monte-Carlo trajectory statistics
    Sample(SampleArgs),
    /// Data-encoding Hamiltonian benchmark
    Encode(EncodeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Dissipative transverse-field Ising model on a built-in lattice
    Tfim,
    /// H = X on one qubit
    SingleTerm,
    /// H = 0.7 X + 0.3 Z on one qubit
    TwoTerm,
    /// Pauli encoding of a random data vector
    Encoding,
    /// Bare (Γ, Ω) pair, estimator only
    Raw,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct ModelArgs {
    /// Model [default: raw when --gamma is given, otherwise tfim]
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// TFIM spin counts, comma or space separated (2, 4 or 6) [default: 2]
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub spins: Option<Vec<usize>>,
    /// TFIM coupling J [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// TFIM transverse field h [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub field: Option<f64>,
    /// TFIM dephasing rate γ [default: 0.1]
    #[arg(long)]
    pub dephasing: Option<f64>,
    /// Encoding data length N [default: 4]
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Encoding data distribution: uniform-pm1, uniform-01 or gauss [default: uniform-pm1]
    #[arg(long)]
    pub dist: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Raw mode: Γ, the sum of the term weights
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Raw mode: Ω, the largest per-term diamond norm [default: 2]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Simulation time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Start of a log-spaced time sweep
    #[arg(long)]
    pub t_min: Option<f64>,
    /// End of a log-spaced time sweep
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Sweep points [default: 10]
    #[arg(long)]
    pub points: Option<usize>,
    /// Target diamond-norm error [default: 0.001]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Per-term norm convention: tight or paper-ising [default: tight]
    #[arg(long)]
    pub convention: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Simulation time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Channel applications N to check [default: 4,16,64,256]
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub steps: Option<Vec<u64>>,
    /// Per-term norm convention: tight or paper-ising [default: tight]
    #[arg(long)]
    pub convention: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Simulation time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Applications per trajectory [default: 32]
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub steps: Option<Vec<usize>>,
    /// Trajectory counts [default: 1000]
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub trajectories: Option<Vec<usize>>,
    /// Fill the seconds column with wall-clock time (breaks byte-identical reruns)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct EncodeArgs {
    /// Data lengths N, comma or space separated [default: 100]
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Data distribution: uniform-pm1, uniform-01 or gauss [default: uniform-pm1]
    #[arg(long)]
    pub dist: Option<String>,
    /// Simulation time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Target diamond-norm error [default: 0.001]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Dense bound check for registers of at most 3 qubits
    #[arg(long)]
    pub exact_check: bool,
}

/// JSON config: global keys at the top level, command options in a section
/// named after the command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub json: Option<bool>,
    pub output: Option<PathBuf>,
    pub estimate: Option<EstimateArgs>,
    pub verify: Option<VerifyArgs>,
    pub sample: Option<SampleArgs>,
    pub encode: Option<EncodeArgs>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?;
        check_section::<EstimateArgs>(&value, "estimate")?;
        check_section::<VerifyArgs>(&value, "verify")?;
        check_section::<SampleArgs>(&value, "sample")?;
        check_section::<EncodeArgs>(&value, "encode")?;
        serde_json::from_value(value).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }
}

// Section keys are the command's long flag names.
fn check_section<T: Args>(config: &serde_json::Value, name: &'static str) -> CliResult<()> {
    let Some(section) = config.get(name) else { return Ok(()) };
    let Some(map) = section.as_object() else {
        return Err(usage(format!("config section {name:?} must be an object")));
    };
    let cmd = T::augment_args(clap::Command::new(name));
    for key in map.keys() {
        if !cmd.get_arguments().any(|a| a.get_long() == Some(key.as_str())) {
            return Err(usage(format!("unknown key {key:?} in config section {name:?}")));
        }
    }
    Ok(())
}

/// Fills options absent on the command line from a lower-precedence source.
pub trait Overlay {
    fn overlay(self, base: Self) -> Self;
}

macro_rules! overlay {
    ($ty:ty { $($opt:ident),* } $(flags { $($flag:ident),* })? $(nested { $($inner:ident),* })?) => {
        impl Overlay for $ty {
            fn overlay(self, base: Self) -> Self {
                Self {
                    $($opt: self.$opt.or(base.$opt),)*
                    $($($flag: self.$flag || base.$flag,)*)?
                    $($($inner: self.$inner.overlay(base.$inner),)*)?
                }
            }
        }
    };
}

overlay!(ModelArgs { model, spins, coupling, field, dephasing, n, dist });
overlay!(EstimateArgs { gamma, omega, t, t_min, t_max, points, epsilon, convention } nested { model });
overlay!(VerifyArgs { t, steps, convention } nested { model });
overlay!(SampleArgs { t, steps, trajectories } flags { timing } nested { model });
overlay!(EncodeArgs { n, dist, t, epsilon } flags { exact_check });

/// Global options after applying the config file.
#[derive(Debug, Clone)]
pub struct Globals {
    pub seed: u64,
    pub threads: Option<usize>,
    pub json: bool,
    pub output: Option<PathBuf>,
}

pub fn resolve_globals(cli: &GlobalArgs, config: &ConfigFile) -> Globals {
    Globals {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        threads: cli.threads.or(config.threads),
        json: cli.json || config.json.unwrap_or(false),
        output: cli.output.clone().or_else(|| config.output.clone()),
    }
}
