//! `quditcorr` command-line front end.
//!
//! Every subcommand validates its flags, runs, and prints a report that
//! starts with the resolved configuration. `--json` switches stdout to
//! machine-readable JSON. Exit codes: 0 ok, 2 usage, 3 invalid state,
//! 4 invalid optimizer config, 5 experiment violation, 6 oracle regression.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "quditcorr", version, about = "Geometric discord of qudit pairs in Bloch coordinates")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the generalized Gell-Mann basis and its structure constants.
    Basis(BasisArgs),
    /// Validate a state file and summarize it.
    Check(StateArgs),
    /// Minimize D1 or D2 over projective measurements on subsystem A.
    Discord(DiscordArgs),
    /// Lower bounds and correlation-matrix diagnostics.
    Bounds(StateArgs),
    /// Build a member of family A or AA.
    Family(FamilyArgs),
    /// Build a U⊗U-invariant Werner state.
    Werner(WernerArgs),
    /// Build a U⊗U*-invariant isotropic state.
    Isotropic(IsotropicArgs),
    /// Run a seeded Monte Carlo experiment.
    Sample(SampleArgs),
    /// Compare the optimizer against brute-force random search.
    OracleCompare(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyFlag {
    A,
    Aa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureFlag {
    D1,
    D2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReprFlag {
    Matrix,
    BipartiteBloch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleFlag {
    HaarUnitary,
    HsDensity,
    LmmRejection,
    FamilyA,
    FamilyAa,
}

#[derive(Debug, Args, Serialize)]
pub struct BasisArgs {
    #[arg(long)]
    pub d: usize,
    /// Write the basis JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StateArgs {
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizerArgs {
    /// Random starting points of the simplex search.
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Objective tolerance of each local search.
    #[arg(long, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyParams {
    #[arg(long, value_enum)]
    pub family: Option<FamilyFlag>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Draw the family unitaries from the seeded stream instead of using I.
    #[arg(long)]
    pub haar: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscordArgs {
    #[arg(long, conflicts_with = "family")]
    pub state: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyParams,
    #[arg(long, value_enum, default_value_t = MeasureFlag::D1)]
    pub measure: MeasureFlag,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerArgs,
    /// Write the report JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyFlag,
    #[arg(long)]
    pub d: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long)]
    pub haar: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ReprFlag::Matrix)]
    pub repr: ReprFlag,
    /// Write the state file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WernerArgs {
    #[arg(long)]
    pub d: usize,
    /// Overlap parameter in [-1, 1]; -1 is the antisymmetric projector.
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, value_enum, default_value_t = ReprFlag::Matrix)]
    pub repr: ReprFlag,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IsotropicArgs {
    #[arg(long)]
    pub d: usize,
    /// Fidelity with the maximally entangled state, in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub f: f64,
    #[arg(long, value_enum, default_value_t = ReprFlag::Matrix)]
    pub repr: ReprFlag,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub ensemble: EnsembleFlag,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write one row per sample here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MeasureFlag::D1)]
    pub measure: MeasureFlag,
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    /// Draw budget per accepted lmm-rejection sample.
    #[arg(long, default_value_t = 10_000)]
    pub max_tries: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Random measurements tried by the oracle.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(commands::CliError::Failed { report, reason, code }) => {
            print!("{report}");
            eprintln!("error: {reason}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
