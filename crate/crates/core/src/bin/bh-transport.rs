use std::path::PathBuf;
use std::process::ExitCode;

use bh_transport::cli::{run, Command, ErrorReport, Overrides};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Linear,
    Sweep,
    Levels,
    Disorder,
}

/// Steady-state transport through a driven-dissipative Bose-Hubbard chain.
#[derive(Parser)]
#[command(version)]
struct Args {
    command: Cmd,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the configuration).
    #[arg(long)]
    workers: Option<usize>,
    /// RNG seed (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Linear => Command::Linear,
        Cmd::Sweep => Command::Sweep,
        Cmd::Levels => Command::Levels,
        Cmd::Disorder => Command::Disorder,
    };
    let overrides = Overrides { out: args.out, workers: args.workers, seed: args.seed };
    match run(command, &args.config, &overrides) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let report = ErrorReport::new(command, &e);
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
