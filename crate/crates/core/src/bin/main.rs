//! Command-line front end: run configured experiments, validate configs,
//! and re-run estimators over existing chains.

use bayes_modes::config::{load_config, ExperimentConfig};
use bayes_modes::experiment::{render_summary, rerun_estimators, run_experiment, RunError};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bayes-modes",
    about = "Bayesian inversion with local mode estimators over box priors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config: sample, estimate, write artifacts.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Override the sampler seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: `output.dir` from the config, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of independent chains; above 1 each chain writes into
        /// its own `chain-i/` subdirectory with seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        chains: usize,
    },
    /// Parse and validate a config, reporting every violation.
    Validate {
        /// Path to the experiment config.
        config: PathBuf,
    },
    /// Re-run the estimators over an existing chain CSV.
    Report {
        /// Chain CSV produced by `run`.
        chain: PathBuf,
        /// Config supplying the prior box, bins, and estimator settings.
        config: PathBuf,
    },
}

// Exit codes: 0 success, 1 config error, 2 runtime/model error.
const EXIT_CONFIG: u8 = 1;

fn load(path: &Path) -> Result<ExperimentConfig, ExitCode> {
    load_config(path).map_err(|err| {
        eprint!("{err}");
        ExitCode::from(EXIT_CONFIG)
    })
}

fn run_exit(err: RunError) -> ExitCode {
    eprintln!("{err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, seed, out, chains } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if chains == 0 {
                eprintln!("--chains must be at least 1");
                return ExitCode::from(EXIT_CONFIG);
            }
            let out_dir =
                out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
            match run_experiment(&cfg, &out_dir, chains) {
                Ok(outcomes) => {
                    for o in &outcomes {
                        print!("{}", render_summary(&cfg, o));
                        println!("artifacts: {}", o.out_dir.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(err) => run_exit(err),
            }
        }
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                let model = cfg.model.build();
                println!(
                    "ok: {} model, {}-dimensional prior, K = {}, burn-in = {}",
                    model.name(),
                    cfg.prior_lower.len(),
                    cfg.iterations,
                    cfg.burn_in
                );
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Report { chain, config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match rerun_estimators(&cfg, &chain) {
                Ok((_, _, report)) => {
                    println!("{}", report.to_json_pretty());
                    ExitCode::SUCCESS
                }
                Err(err) => run_exit(err),
            }
        }
    }
}
