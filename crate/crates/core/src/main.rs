use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use randop_core::cli::{self, RunOptions};

/// Exact analysis of linear random operators over finite probability spaces.
#[derive(Parser)]
#[command(name = "randop", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses of a scenario.
    Run {
        scenario: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run only this analysis (repeatable).
        #[arg(long = "analysis")]
        analyses: Vec<String>,
        /// Override the number of basis probes.
        #[arg(long)]
        probe_basis_max: Option<u64>,
    },
    /// Check a scenario file.
    Validate {
        scenario: PathBuf,
        /// Print the canonical form of the scenario.
        #[arg(long)]
        canonical: bool,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match args.command {
        Command::Run {
            scenario,
            report,
            analyses,
            probe_basis_max,
        } => cli::run(
            &scenario,
            &RunOptions {
                report,
                analyses,
                probe_basis_max,
            },
        )
        .map(|lines| lines.join("\n")),
        Command::Validate { scenario, canonical } => cli::validate(&scenario).map(|text| {
            if canonical {
                text
            } else {
                format!("ok: {}", scenario.display())
            }
        }),
    };
    match outcome {
        Ok(text) => {
            println!("{text}");
            ExitCode::from(cli::EXIT_OK)
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
