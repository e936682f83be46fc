//! `sbr`: reproducible experiments for sticky Brownian rounding.
//!
//! Every subcommand writes one report — JSON by default, CSV with
//! `--format csv` — to standard output or `--output`. Reports contain no
//! timestamps, so a fixed configuration and seed reproduce them byte for
//! byte; wall-clock timing goes to standard error.
//!
//! ```sh
//! sbr prob --sweep 0.1:3.1:0.1 --routes exact,pde
//! sbr ratio --problem max2sat --delta 0.02 --summary
//! sbr round --input graph.txt --trials 200
//! sbr pde --theta 2.0 --alpha 1.61 --at 0.5,-0.25
//! sbr verify --quick
//! sbr constrained --input graph_with_constraints.txt --epsilon 0.1
//! sbr --config run.conf ratio --problem dicut
//! ```

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use commands::{ConstrainedArgs, Outcome, PdeArgs, ProbArgs, RatioArgs, RoundArgs, VerifyArgs};

#[derive(Debug, Parser)]
#[command(name = "sbr", version, about = "Sticky Brownian rounding experiments", args_override_self = true)]
struct Cli {
    /// Random seed (all streams are derived from it).
    #[arg(long, env = "SBR_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value file of default options; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Separation probability of a half-marginal Max-Cut pair by several routes.
    #[command(args_override_self = true)]
    Prob(ProbArgs),
    /// Worst-case approximation ratio over the discretized configuration space.
    #[command(args_override_self = true)]
    Ratio(RatioArgs),
    /// Solve the relaxation of an instance and round it repeatedly.
    #[command(args_override_self = true)]
    Round(RoundArgs),
    /// Solve one Dirichlet problem of the walk's generator.
    #[command(args_override_self = true)]
    Pde(PdeArgs),
    /// Maximum-principle certificates and invariant checks; exits 1 on failure.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Max-Cut with cardinality side constraints.
    #[command(args_override_self = true)]
    Constrained(ConstrainedArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prob(_) => "prob",
            Command::Ratio(_) => "ratio",
            Command::Round(_) => "round",
            Command::Pde(_) => "pde",
            Command::Verify(_) => "verify",
            Command::Constrained(_) => "constrained",
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Prob(a) => commands::prob(a, cli.seed),
        Command::Ratio(a) => commands::ratio(a, cli.seed),
        Command::Round(a) => commands::round(a, cli.seed),
        Command::Pde(a) => commands::pde(a),
        Command::Verify(a) => commands::verify(a),
        Command::Constrained(a) => commands::constrained(a, cli.seed),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let mut text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.json)?,
        Format::Csv => outcome.csv.clone(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn main() -> Result<ExitCode> {
    let args = config::apply_config(std::env::args().collect())?;
    let cli = Cli::parse_from(args);
    if let Some(t) = cli.threads {
        anyhow::ensure!(t >= 1, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let start = Instant::now();
    let outcome = run(&cli).with_context(|| format!("sbr {} failed", cli.command.name()))?;
    emit(&cli, &outcome)?;
    eprintln!("sbr {}: {:.3} s", cli.command.name(), start.elapsed().as_secs_f64());
    if outcome.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failing checks: {}", outcome.failing.join(", "));
        Ok(ExitCode::FAILURE)
    }
}
