//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hetcoop::analytic::AssociationModel;

#[derive(Debug, Clone, Parser)]
#[command(name = "hetcoop", version, about = "Two-tier HetNet coverage, rate and energy-efficiency analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every Monte Carlo path.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Emit SINR thresholds as linear ratios instead of dB.
    #[arg(long, global = true)]
    pub linear: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate one scenario: association, coverage, rate, power, throughput, EE (JSON).
    Eval(EvalArgs),
    /// Sweep one config key over a grid (CSV).
    Sweep(SweepArgs),
    /// Compare analytic values against Monte Carlo (CSV; exit 4 on failure).
    Validate(ValidateArgs),
    /// Reproduce a figure preset: fig2 .. fig7 (CSV).
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ModelChoice {
    Noncoop,
    Coop,
    #[default]
    Both,
}

impl ModelChoice {
    pub fn models(self) -> Vec<AssociationModel> {
        match self {
            ModelChoice::Noncoop => vec![AssociationModel::NonCooperative],
            ModelChoice::Coop => vec![AssociationModel::Cooperative],
            ModelChoice::Both => vec![AssociationModel::NonCooperative, AssociationModel::Cooperative],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Scenario config (TOML, or JSON by extension); defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// SINR thresholds in dB: `a,b,c` or `start:stop:step`; "" for none.
    #[arg(long, allow_hyphen_values = true, default_value = "-10:20:2")]
    pub theta_db: String,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Config key to sweep.
    #[arg(long)]
    pub param: String,
    /// Values for the key: `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// Comma-separated metric ids (see `hetcoop sweep --help`).
    ///
    /// p_sbs_{no,co}, p_cov_{mbs,sbs,overall}_{no,co}, tau_{no,co},
    /// power_{no,co}, throughput_{no,co}, ee_{no,co}. `_noncoop` and
    /// `_coop` suffixes are accepted too.
    #[arg(long)]
    pub metrics: String,
    /// Coverage threshold in dB.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta")]
    pub theta_db: Option<f64>,
    /// Coverage threshold as a linear ratio.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    /// Coverage thresholds in dB.
    #[arg(long, allow_hyphen_values = true, default_value = "-5,0,5,10")]
    pub theta_db: String,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,
    /// Self-test hook: scale the named analytic value by 1.1.
    #[arg(long, hide = true)]
    pub perturb: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// fig2, fig3, fig4, fig5, fig6 or fig7.
    pub id: String,
}
