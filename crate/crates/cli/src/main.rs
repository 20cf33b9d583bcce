use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fracdiff::run::{DEFAULT_B_MAX, DEFAULT_DEPTH, DEFAULT_EPS, DEFAULT_SCALE, DEFAULT_T_MAX};
use fracdiff::{run, Command, JobSpec};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    /// Complex dimensions: roots.csv, summary.json, dims.svg
    Dims,
    /// Geometric zeta function: zeta.csv, lengths.csv, partial_sums.csv
    Zeta,
    /// Displacement counts and frequencies: autocorr.csv (+ values.json)
    Autocorr,
    /// Diffraction comb: comb.csv, comb.svg (+ values.json)
    Diffract,
    /// Randomized Poisson summation checks: report.json
    PsfCheck,
}

/// Complex dimensions of lattice self-similar strings and diffraction of
/// degenerate ideal crystals.
#[derive(Debug, Parser)]
#[command(name = "fracdiff", version)]
struct Args {
    #[arg(value_enum)]
    command: CommandArg,
    /// Input JSON file (optional for psf-check)
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long = "out", value_name = "DIR")]
    output: PathBuf,
    /// Window half-height |Im s| for dims and zeta
    #[arg(long, value_name = "F", default_value_t = DEFAULT_T_MAX)]
    t_max: f64,
    /// Averaging scale for autocorr
    #[arg(long = "L", value_name = "F", default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Largest |b| listed by diffract
    #[arg(long, value_name = "F", default_value_t = DEFAULT_B_MAX)]
    b_max: f64,
    /// Truncation budget for lattice sums
    #[arg(long, value_name = "F", default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Word length for zeta length enumeration
    #[arg(long, value_name = "N", default_value_t = DEFAULT_DEPTH)]
    depth: u32,
    /// Seed for the root finder and psf-check trials
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        CommandArg::Dims => Command::Dims,
        CommandArg::Zeta => Command::Zeta,
        CommandArg::Autocorr => Command::Autocorr,
        CommandArg::Diffract => Command::Diffract,
        CommandArg::PsfCheck => Command::PsfCheck,
    };
    let job = JobSpec {
        t_max: args.t_max,
        scale: args.scale,
        b_max: args.b_max,
        eps: args.eps,
        depth: args.depth,
        seed: args.seed,
        ..JobSpec::new(command, args.input, args.output)
    };
    match run(&job) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
