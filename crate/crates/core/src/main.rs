use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wcec_lab::cli::{run, Command};

/// Probabilistic worst-case energy experiments on the simulated core.
#[derive(Parser)]
#[command(name = "wcec-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command, &args.config, args.seed, args.out) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wcec-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
