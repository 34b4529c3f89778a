use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "crossent", version, about = "Cross-entropy estimation between stationary sources")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model file utilities.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Print a sample path as whitespace-separated symbol indices.
    Sample {
        file: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print alphabet labels instead of indices.
        #[arg(long)]
        labels: bool,
    },
    /// Run a Monte Carlo estimation experiment from a JSON spec.
    Estimate {
        #[arg(value_enum)]
        estimator: EstimatorArg,
        #[arg(long)]
        spec: PathBuf,
        /// Override the spec's CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Closed-form and enumerated reference values.
    #[command(subcommand)]
    Exact(ExactCommand),
    /// Decoupling audits.
    Audit(AuditArgs),
    /// Canned experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Regenerate an SVG plot from its metadata file and CSVs.
    Plot {
        meta: PathBuf,
        /// Output path; defaults to the `svg` entry of the metadata.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Check a model file and print its structure.
    Validate { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ExactCommand {
    /// Cross-entropy rate of X against Y (block enumeration when `--n` is given
    /// or either model is not an observed Markov chain).
    CrossEntropy {
        file_x: PathBuf,
        file_y: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        bits: bool,
    },
    /// Entropy rate of a Markov chain model.
    Entropy {
        file: PathBuf,
        #[arg(long)]
        bits: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Wait,
    Match,
    Statistic,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write an SVG plot.
    #[arg(long)]
    pub plot: bool,
    /// Report values in bits.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Sld,
    Ild,
    Ud,
    Psi,
    Gap,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(value_enum)]
    pub condition: ConditionArg,
    pub file: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 4)]
    pub m_max: usize,
    /// Largest gap searched by SLD.
    #[arg(long, default_value_t = 2)]
    pub tau: usize,
    /// Largest separation for PSI.
    #[arg(long, default_value_t = 10)]
    pub ell: usize,
    /// PSI fails when psi(ell) is not below this value.
    #[arg(long)]
    pub target: Option<f64>,
    /// Past word for GAP, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<u32>,
    /// Future word for GAP, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<u32>,
    #[arg(long, default_value_t = 1000)]
    pub gap_budget: usize,
    /// Cap on enumerated word pairs.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Print JSON instead of the table.
    #[arg(long)]
    pub print_json: bool,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Match-length estimates for X = Y and X != Y on the 4-state periodic fixture.
    Figure1 {
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value = "figure1")]
        out: PathBuf,
        /// Override the m grid (comma separated).
        #[arg(long, value_delimiter = ',')]
        m_grid: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
}
