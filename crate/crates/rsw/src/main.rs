use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rsw::{run, Command, RunConfig};

#[derive(Parser)]
#[command(name = "rsw", version, about = "Rotor/spin-wave quench dynamics of XXZ spin lattices")]
struct Cli {
    #[command(subcommand)]
    command: Mode,
}

#[derive(Subcommand)]
enum Mode {
    /// Time series of collective observables, correlations and entropies.
    Dynamics(Args),
    /// Minimum squeezing over an (alpha, N) grid of 1d chains.
    Scan(Args),
    /// Tower-of-states inertia from exact sector minima.
    Tos(Args),
    /// Exact and rotor/spin-wave series side by side.
    OracleCompare(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Mode::Dynamics(a) => (Command::Dynamics, a),
        Mode::Scan(a) => (Command::Scan, a),
        Mode::Tos(a) => (Command::Tos, a),
        Mode::OracleCompare(a) => (Command::OracleCompare, a),
    };
    let result = RunConfig::load(&args.config).and_then(|cfg| run(command, cfg, &args.out, args.workers));
    match result {
        Ok(output) => {
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            for f in &output.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprint!("{e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
