//! `pauli-probe`: runs a configured estimation experiment on simulated
//! cycle benchmarking data and writes machine-readable results.

mod config;
mod exit;
mod record;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ConfigArgs;
use exit::CliError;

#[derive(Parser)]
#[command(name = "pauli-probe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment and write report.json, budget.json, decay.csv and
    /// experiments.jsonl into --out.
    Run(ConfigArgs),
    /// Parse the inputs, print the predicted budget and runtime, and check
    /// the noise assumptions without simulating.
    Validate(ConfigArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => args.resolve().and_then(|cfg| run::run(&cfg)),
        Command::Validate(args) => args.resolve().and_then(|cfg| {
            let summary = run::validate(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&summary).map_err(CliError::from)?);
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
