//! Command-line front end: every subcommand prints (or writes) one JSON
//! report with an embedded run manifest.
//!
//! Exit codes: 0 when everything verified, 1 when a verification failed
//! (the report is still written), 2 on usage or input errors.

mod commands;
mod inputs;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "forecastq", version, about = "Forecasting query complexity toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Also write the report's main table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scoring rules.
    #[command(subcommand)]
    Scores(commands::ScoresCmd),
    /// Distances between distribution pairs.
    #[command(subcommand)]
    Distances(commands::DistancesCmd),
    /// Score amplification.
    #[command(subcommand)]
    Amplify(commands::AmplifyCmd),
    /// Brute-force complexity oracles.
    #[command(subcommand)]
    Oracle(commands::OracleCmd),
    /// Compute a hard input distribution.
    SolveHard(commands::SolveHardArgs),
    /// Check lower-bound inequalities.
    #[command(subcommand)]
    Verify(commands::VerifyCmd),
    /// Amplification polynomials.
    #[command(subcommand)]
    Polyamp(commands::PolyampCmd),
    /// solve-hard followed by every verification.
    Suite(commands::SuiteArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut manifest = RunManifest::new(std::env::args().collect(), cli.global.seed);
    let outcome = match commands::run(&cli.command, &cli.global, &mut manifest) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut report = outcome.report;
    if let Some(map) = report.as_object_mut() {
        map.insert("manifest".into(), manifest.to_json_value());
    }
    if let Err(e) = output::write_json(&report, cli.global.out.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if let (Some(path), Some(table)) = (cli.global.csv.as_deref(), outcome.table.as_ref()) {
        if let Err(e) = output::write_csv(table, path) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
