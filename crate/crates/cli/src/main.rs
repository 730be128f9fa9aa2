//! Batch front end for the curve-resolution workbench.
//!
//! Every subcommand reads CSV/JSON, writes its results into `--out-dir`,
//! and drops a `manifest.json` whose recorded arguments replay the run
//! byte-identically. Exit codes: 0 success, 1 negative analysis verdict
//! (e.g. a reducible matrix), 2 usage or input error, 3 numerical failure.

mod cmds;
mod io;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use io::{Format, Workspace};

#[derive(Parser)]
#[command(name = "curveres", version, about = "Curve-resolution workbench")]
struct Cli {
    /// PRNG seed for any stochastic step (noise synthesis).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory receiving all output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Matrix output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the run manifest to this path instead of out-dir/manifest.json.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// List the built-in presets of every subcommand and exit.
    #[arg(long)]
    list_presets: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a kinetic model and report conservation and rank.
    Simulate(cmds::SimulateArgs),
    /// Singular values and numerical rank of a matrix.
    Rank(cmds::RankArgs),
    /// External/internal normalizations, including the iterative variant.
    Normalize(cmds::NormalizeArgs),
    /// Multi-equilibria titration: species table plus rank verdict.
    Titrate(cmds::TitrateArgs),
    /// Irreducibility verdict from the nonzero pattern.
    Reduce(cmds::ReduceArgs),
    /// Signal-contribution grid study over the two-component region.
    Scf(cmds::ScfArgs),
    /// Least-squares spectral recovery, optionally with known spectra or
    /// augmented datasets.
    Recover(cmds::RecoverArgs),
    /// Evaluate a spectrum set on its wavelength grid.
    Spectra(cmds::SpectraArgs),
    /// Synthesize a full (C, A, D) dataset with optional noise.
    Synth(cmds::SynthArgs),
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn numerical_from(e: curveres::Error) -> Self {
        Self::numerical(e.to_string())
    }
}

impl From<curveres::Error> for CliError {
    fn from(e: curveres::Error) -> Self {
        use curveres::Error;
        match &e {
            Error::Integration(_) => Self::numerical(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_presets {
        cmds::print_presets();
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given (try --help or --list-presets)");
        return ExitCode::from(2);
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let ws = match Workspace::new(&cli.out_dir, cli.format, cli.seed, cli.manifest.clone()) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    let run = match command {
        Command::Simulate(args) => cmds::simulate(args, ws, &argv),
        Command::Rank(args) => cmds::rank(args, ws, &argv),
        Command::Normalize(args) => cmds::normalize(args, ws, &argv),
        Command::Titrate(args) => cmds::titrate(args, ws, &argv),
        Command::Reduce(args) => cmds::reduce(args, ws, &argv),
        Command::Scf(args) => cmds::scf(args, ws, &argv),
        Command::Recover(args) => cmds::recover(args, ws, &argv),
        Command::Spectra(args) => cmds::spectra(args, ws, &argv),
        Command::Synth(args) => cmds::synth(args, ws, &argv),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
