use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use weakmeter_cli::commands::{self, DEFAULT_WARN_AAV};
use weakmeter_cli::output::{emit, Format};
use weakmeter_cli::scenario::Scenario;
use weakmeter_cli::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "weakmeter",
    version,
    about = "Fisher information of weak-value and standard meters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format. Defaults to json for report and montecarlo, csv otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps and Monte Carlo replicates.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Warn when g|A_w|/sigma exceeds this ratio.
    #[arg(long, global = true, default_value_t = DEFAULT_WARN_AAV)]
    warn_aav: f64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Fisher information figures for the scenario.
    Report,
    /// Wigner function of the post-selected meter on an (x, k) grid.
    Wigner,
    /// Detector efficiency across the noise model's natural variable.
    Efficiency,
    /// Vary one scenario parameter and tabulate the figures.
    Sweep,
    /// Seeded Monte Carlo check against the Cramér-Rao bound.
    Montecarlo,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads: must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    if cli.warn_aav.is_nan() || cli.warn_aav < 0.0 {
        return Err(CliError::Validation(format!(
            "--warn-aav: must be non-negative, got {}",
            cli.warn_aav
        ))
        .into());
    }
    let path = cli
        .scenario
        .ok_or_else(|| CliError::Validation("--scenario <path> is required".into()))?;
    let scenario = Scenario::load(&path)?;

    let (table, default_format) = match cli.command {
        Command::Report => {
            let (table, warning) = commands::report(&scenario, cli.warn_aav)?;
            if let Some(w) = warning {
                eprintln!("{w}");
            }
            (table, Format::Json)
        }
        Command::Wigner => (commands::wigner(&scenario)?, Format::Csv),
        Command::Efficiency => (commands::efficiency(&scenario)?, Format::Csv),
        Command::Sweep => (commands::sweep(&scenario)?, Format::Csv),
        Command::Montecarlo => (commands::montecarlo(&scenario)?, Format::Json),
    };
    emit(
        &table.render(cli.format.unwrap_or(default_format)),
        cli.out.as_deref(),
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // CliError already renders its cause.
            let code = match e.downcast_ref::<CliError>() {
                Some(c) => {
                    eprintln!("error: {c}");
                    c.exit_code()
                }
                None => {
                    eprintln!("error: {e:#}");
                    2
                }
            };
            ExitCode::from(code as u8)
        }
    }
}
