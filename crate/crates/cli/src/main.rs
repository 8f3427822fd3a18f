mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Tail asymptotics and oracle checks for bivariate scale mixtures.
#[derive(Parser)]
#[command(name = "scalemix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the oracle seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo and grid evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Asymptotic approximations on the x grid.
    Approx,
    /// Convergence table of approximation against oracle.
    Compare,
    /// Empirical conditional excess law against its limit.
    Excess,
    /// Closed-form and empirical residual dependence index.
    Eta,
    /// Built-in invariant suite.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Approx => "approx",
            Self::Compare => "compare",
            Self::Excess => "excess",
            Self::Eta => "eta",
            Self::Verify => "verify",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let (report, bytes, seed) = match cli.command {
        Command::Verify => {
            let bytes = match &cli.config {
                Some(p) => std::fs::read(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
                None => vec![],
            };
            let seed = cli.seed.unwrap_or(scalemix_core::OracleConfig::default().seed);
            (commands::verify(seed), bytes, seed)
        }
        cmd => {
            let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
            let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Config(e.to_string()))?;
            let exp = ExperimentConfig::parse(text)?.build(cli.seed)?;
            let report = match cmd {
                Command::Approx => commands::approx(&exp)?,
                Command::Compare => commands::compare(&exp)?,
                Command::Excess => commands::excess(&exp)?,
                Command::Eta => commands::eta(&exp)?,
                Command::Verify => unreachable!(),
            };
            (report, bytes, exp.oracle.seed)
        }
    };
    let csv = report.table.render(cli.command.name(), &bytes, seed)?;
    match &cli.out {
        Some(p) => std::fs::write(p, &csv)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&csv)?;
        }
    }
    report.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scalemix: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
