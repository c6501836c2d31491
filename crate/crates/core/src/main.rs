use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclap::io::{run_compare_fft, run_fracderiv, run_soliton, run_trace, CliError, RunConfig};
use log::{error, info};

/// Rational-order fractional derivatives on the real line and solitary
/// waves of fractional KdV.
#[derive(Parser)]
#[command(name = "fraclap", version)]
struct Cli {
    /// JSON file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// D^α of a builtin or sampled function, per-domain CSV and a report
    Fracderiv(RunConfig),
    /// DFT error sweeps and a DFT/multi-domain comparison
    CompareFft(RunConfig),
    /// Solitary wave at one order
    Soliton(RunConfig),
    /// Continuation of the solitary wave in α
    Trace(RunConfig),
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let ok = match cli.command {
        Command::Fracderiv(flags) => {
            run_fracderiv(&flags.over(file))?;
            true
        }
        Command::CompareFft(flags) => {
            run_compare_fft(&flags.over(file))?;
            true
        }
        Command::Soliton(flags) => {
            let report = run_soliton(&flags.over(file))?;
            let s = &report.solution;
            info!(
                "α = {}: {:?} after {} Newton steps, residual {:.2e}, peak {:.10}",
                s.order, s.status, s.newton_steps, s.residual, s.peak
            );
            if let Some(msg) = &report.halted {
                error!("continuation halted: {msg}");
            }
            report.succeeded()
        }
        Command::Trace(flags) => {
            let report = run_trace(&flags.over(file))?;
            for s in &report.steps {
                info!("α = {}: residual {:.2e}, peak {:.10}", s.order, s.residual, s.peak);
            }
            report.completed()
        }
    };
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
