use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nhsum::cli::{self, Command};

#[derive(Parser)]
#[command(name = "nhsum", version, about = "Summation experiments for non-harmonic Fourier series")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the subcommand named in the config file
    Run { config: PathBuf },
    /// (A2), Carleson and integrability report
    Diagnose { config: PathBuf },
    /// Weight tables for the configured schemes
    Weights { config: PathBuf },
    /// Partial-sum errors per schedule step
    Converge { config: PathBuf },
    /// Operator-norm lower bounds per schedule step
    CompareNorms { config: PathBuf },
    /// Contour schedule with slopes, alphas and margins
    Contours { config: PathBuf },
    /// |G| against the outer/Blaschke/exponential factorization
    FactorizeCheck { config: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (config, command) = match args.command {
        Cmd::Run { config } => (config, None),
        Cmd::Diagnose { config } => (config, Some(Command::Diagnose)),
        Cmd::Weights { config } => (config, Some(Command::Weights)),
        Cmd::Converge { config } => (config, Some(Command::Converge)),
        Cmd::CompareNorms { config } => (config, Some(Command::CompareNorms)),
        Cmd::Contours { config } => (config, Some(Command::Contours)),
        Cmd::FactorizeCheck { config } => (config, Some(Command::FactorizeCheck)),
    };
    match cli::run(&config, command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nhsum: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
