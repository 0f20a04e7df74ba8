use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lqrlab::{parse_seeds, run_experiment, ExperimentKind, RunOptions};

/// Runs one experiment and writes its artifacts and manifest.
///
/// Exit status: 0 on success, 2 on a configuration error, 3 on a numerical
/// failure. LQRLAB_THREADS caps the worker pool.
#[derive(Debug, Parser)]
#[command(name = "lqrlab", version)]
struct Cli {
    kind: ExperimentKind,
    #[arg(long)]
    config: PathBuf,
    /// `7`, `1,4,9`, `1..50` (inclusive) or `1..=50`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("LQRLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the thread pool: {e}");
                }
            }
            _ => {
                eprintln!("LQRLAB_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let seeds = match cli.seeds.as_deref().map(parse_seeds).transpose() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let outcome = run_experiment(cli.kind, &cli.config, &RunOptions { seeds, out: cli.out });
    match &outcome.manifest.error {
        None => println!("{} ok: {}", outcome.manifest.kind, outcome.out_dir.display()),
        Some(e) => eprintln!("{} failed in {} ({}): {}", outcome.manifest.kind, e.module, e.name, e.message),
    }
    ExitCode::from(outcome.exit_code as u8)
}
