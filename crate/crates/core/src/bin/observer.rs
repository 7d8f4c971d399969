use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use predictive_observer::report::to_json_line;
use predictive_observer::workflow::{self, Prepared, VerifyOptions};
use predictive_observer::ObserverError;

#[derive(Parser)]
#[command(name = "observer", version, about = "Information and dissipation of qubit observers")]
struct Cli {
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampling, Monte Carlo and optimizer restarts.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact information report for the configured strategy.
    Analyze,
    /// Beta sweep of the soft optimizer plus the zero-bound degeneracy.
    Optimize,
    /// Simulate one question/answer string.
    Sample {
        #[arg(long, default_value_t = 1000)]
        length: usize,
    },
    /// Check chain tables and estimates against brute-force oracles.
    Verify {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Joint CSV expected to equal the window joint.
        #[arg(long)]
        reference_joint: Option<PathBuf>,
    },
}

fn fail(e: ObserverError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config.as_deref() else {
        eprintln!("error: --config is required");
        return ExitCode::from(1);
    };
    let prepared = match Prepared::load(config) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let out = prepared.output_dir(cli.out.as_deref());
    match cli.command {
        Command::Analyze => match workflow::analyze(&prepared, &out) {
            Ok(a) => {
                println!(
                    "{}: i_mem={} i_pred={} nostalgia={}",
                    a.scenario, a.report.i_mem, a.report.i_pred, a.report.nostalgia
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Optimize => match workflow::optimize(&prepared, cli.seed, &out) {
            Ok(o) if o.all_converged => ExitCode::SUCCESS,
            Ok(o) => {
                let missing: Vec<String> = o
                    .points
                    .iter()
                    .filter(|p| !p.converged)
                    .map(|p| p.beta.to_string())
                    .collect();
                eprintln!("not converged at beta = {}", missing.join(", "));
                ExitCode::from(2)
            }
            Err(e) => fail(e),
        },
        Command::Sample { length } => match workflow::sample(&prepared, length, cli.seed.unwrap_or(0), &out) {
            Ok(path) => {
                println!("{}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify {
            samples,
            reference_joint,
        } => {
            let options = VerifyOptions {
                samples,
                seed: cli.seed.unwrap_or(0),
                reference_joint,
            };
            match workflow::verify(&prepared, &options, &out) {
                Ok(verdicts) => {
                    for v in &verdicts {
                        match to_json_line(v) {
                            Ok(line) => println!("{line}"),
                            Err(e) => return fail(e),
                        }
                    }
                    if verdicts.iter().all(|v| v.pass) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}
