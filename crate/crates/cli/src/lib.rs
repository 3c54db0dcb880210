//! `qfm` command-line front end.

pub mod commands;
pub mod config;
pub mod heatmap;

use clap::{Parser, Subcommand};

pub use config::{CommonArgs, Format, OneOrMany, RunConfig};
pub use heatmap::render_heatmap;

/// Exit status for invalid configuration. Clap usage errors use the same code.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Runtime(e) => e,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qfm", version, about = "Fourier fingerprints of quantum models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation matrix of sampled Fourier coefficients (CSV, metadata, SVG).
    Fingerprint(CommonArgs),
    /// FCC summary for one or more ansatzes.
    Fcc(CommonArgs),
    /// KL divergence of ansatz state fidelities to the Haar distribution.
    Expressibility(CommonArgs),
    /// Per-frequency variance of sampled coefficients.
    Variance(CommonArgs),
    /// Fingerprint of the Gaussian surrogate coefficient model.
    Surrogate(CommonArgs),
    /// Fit a random Fourier series with Adam.
    TrainFs(CommonArgs),
    /// Fit leading-pT regression on dilepton events.
    TrainHep(CommonArgs),
    /// Training grid over ansatzes and seeds with FCC and expressibility columns.
    Experiment(CommonArgs),
    /// Timing of FCC against expressibility per qubit count.
    Bench(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Fingerprint(a)
            | Command::Fcc(a)
            | Command::Expressibility(a)
            | Command::Variance(a)
            | Command::Surrogate(a)
            | Command::TrainFs(a)
            | Command::TrainHep(a)
            | Command::Experiment(a)
            | Command::Bench(a) => a,
        }
    }
}

/// Loads the config file (if any), applies flags and runs the command.
pub fn run(cli: Cli) -> Result<(), Failure> {
    let args = cli.command.args();
    let base = match &args.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    let cfg = base.merge_flags(args);
    match cli.command {
        Command::Fingerprint(_) => commands::fingerprint(cfg, false),
        Command::Surrogate(_) => commands::fingerprint(cfg, true),
        Command::Fcc(_) => commands::fcc_table(cfg),
        Command::Expressibility(_) => commands::expressibility_cmd(cfg),
        Command::Variance(_) => commands::variance(cfg),
        Command::TrainFs(_) => commands::train_fs(cfg),
        Command::TrainHep(_) => commands::train_hep_cmd(cfg),
        Command::Experiment(_) => commands::experiment(cfg),
        Command::Bench(_) => commands::bench(cfg),
    }
}
