//! `lipeq`: class validation, graph-directed partitions, equivalence
//! decisions, dimension estimates and layout diagrams for homogeneous
//! self-similar sets with complete overlaps.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;
mod render;
mod report;
mod spec;

use commands::{DimOptions, EquivOptions, Outcome, Status};

#[derive(Debug, Parser)]
#[command(name = "lipeq", version, about)]
#[command(after_help = "Exit codes: 0 ok, 1 input or usage error, 2 outside the class, \
                        3 inconclusive, 4 verification failure.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the class conditions and print the overlap certificate.
    Validate { spec: PathBuf },
    /// Print the overlap-length classes and the relabelling they induce.
    Gamma { spec: PathBuf },
    /// Build and verify the graph-directed partition.
    Graph {
        spec: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Decide Lipschitz equivalence of two systems.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Cover depth for verifying both partitions.
        #[arg(long)]
        depth: Option<usize>,
        /// Number of sampled word pairs for the distortion check.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Length of the sampled words.
        #[arg(long)]
        sample_depth: Option<usize>,
    },
    /// Spectral dimension and the box-counting cross-check.
    Dim {
        spec: PathBuf,
        /// Box-counting depth.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Maximum number of enumerated words (default from LIPEQ_ENUM_CAP).
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Draw the first-level images of each spec side by side as SVG.
    Render {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Validate { spec } => commands::validate(&spec),
        Command::Gamma { spec } => commands::gamma(&spec),
        Command::Graph { spec, depth } => commands::graph(&spec, depth),
        Command::Equiv { a, b, depth, pairs, seed, sample_depth } => commands::equiv(
            &a,
            &b,
            &EquivOptions { depth, pairs, seed, sample_depth },
        ),
        Command::Dim { spec, depth, tol, cap } => commands::dim(&spec, &DimOptions { depth, tol, cap }),
        Command::Render { specs, output } => commands::render(&specs, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(Status::Failure as u8);
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            match serde_json::to_string_pretty(&outcome.report) {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(Status::Failure as u8);
                }
            }
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Failure as u8)
        }
    }
}
