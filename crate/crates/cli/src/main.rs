mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use cat_tomo::wigner::Convention;
use cat_tomo::BellState;
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Context;
use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Simulate conditionally prepared cat states and their homodyne tomography.
#[derive(Debug, Parser)]
#[command(name = "cat-tomo", version)]
struct Cli {
    /// Experiment description (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for CSV and JSON output.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Overrides the noise seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Wigner scale: `phys` integrates to 1, `paper` is 2π times larger.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the cat's Fock amplitudes, norm and mean photon number.
    CatState,
    /// Build the three-photon GHZ state from a Bell pair and check correlations.
    Ghz {
        #[arg(value_enum)]
        bell: Option<BellArg>,
    },
    /// Write the simulated quadrature distributions (phi,x,p).
    Quadrature,
    /// Write the exact Wigner function on a grid (re,im,w).
    WignerOracle,
    /// Tomographic reconstruction and minimum report.
    Reconstruct {
        /// Reconstruct this quadrature CSV instead of simulated data.
        #[arg(long, value_name = "CSV")]
        table: Option<PathBuf>,
    },
    /// Monte Carlo study of the reconstructed minimum under slice noise.
    NoiseStudy,
    /// Cross-check the Wigner evaluators, filter kernel and convention factor.
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Phys,
    Paper,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BellArg {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl From<BellArg> for BellState {
    fn from(b: BellArg) -> Self {
        match b {
            BellArg::PhiPlus => BellState::PhiPlus,
            BellArg::PhiMinus => BellState::PhiMinus,
            BellArg::PsiPlus => BellState::PsiPlus,
            BellArg::PsiMinus => BellState::PsiMinus,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let ctx = Context {
        config,
        out: cli.out,
        seed: cli.seed,
        convention: cli.convention.map(|c| match c {
            ConventionArg::Phys => Convention::Phys,
            ConventionArg::Paper => Convention::Paper,
        }),
    };
    match cli.command {
        Command::CatState => commands::cat_state(&ctx),
        Command::Ghz { bell } => commands::ghz(&ctx, bell.map(Into::into)),
        Command::Quadrature => commands::quadrature(&ctx),
        Command::WignerOracle => commands::wigner_oracle(&ctx),
        Command::Reconstruct { table } => commands::reconstruct(&ctx, table.as_deref()),
        Command::NoiseStudy => commands::noise_study(&ctx),
        Command::Verify => commands::verify(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cat-tomo: {}", e.diagnostic());
            ExitCode::from(e.exit_code())
        }
    }
}
