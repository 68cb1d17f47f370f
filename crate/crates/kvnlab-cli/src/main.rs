mod commands;
mod config;
mod report;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Experiment runner for operatorial classical mechanics.
#[derive(Debug, Parser)]
#[command(name = "kvnlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML, one section per subcommand).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV files and summary.txt.
    #[arg(long, global = true, default_value = "kvnlab-out")]
    out: PathBuf,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the pass tolerance of the main check.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Anticommutation relations of the Grassmann operators.
    AlgebraCheck,
    /// Schouten, Nijenhuis-Richardson and superfield identities on random inputs.
    BracketsCheck,
    /// Hermiticity of the evolution operator under each scalar product.
    MetricReport,
    /// Classical or quantum Gaussian evolution with moment tracking.
    Evolve,
    /// Two-slit screen distributions.
    TwoSlit,
    /// Non-selective measurement, classical and quantum.
    Nsm,
    /// Landau-problem spectra.
    Landau,
    /// Aharonov-Bohm spectra with and without flux.
    Ab,
    /// No-go scan over Hamiltonians and scalar products.
    Nogo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::BracketsCheck => "brackets-check",
            Command::MetricReport => "metric-report",
            Command::Evolve => "evolve",
            Command::TwoSlit => "two-slit",
            Command::Nsm => "nsm",
            Command::Landau => "landau",
            Command::Ab => "ab",
            Command::Nogo => "nogo",
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("KVNLAB_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("KVNLAB_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let name = cli.command.name();
    let section = config::load(cli.config.as_deref(), name)?;
    let mut out = report::Report::new(&cli.out, name)?;
    let ctx = commands::Context { cfg: &section, seed: cli.seed, tol: cli.tol };
    match cli.command {
        Command::AlgebraCheck => commands::algebra_check(&ctx, &mut out),
        Command::BracketsCheck => commands::brackets_check(&ctx, &mut out),
        Command::MetricReport => commands::metric_report(&ctx, &mut out),
        Command::Evolve => commands::evolve(&ctx, &mut out),
        Command::TwoSlit => commands::two_slit(&ctx, &mut out),
        Command::Nsm => commands::nsm(&ctx, &mut out),
        Command::Landau => commands::landau(&ctx, &mut out),
        Command::Ab => commands::ab(&ctx, &mut out),
        Command::Nogo => commands::nogo(&ctx, &mut out),
    }
    .with_context(|| format!("{name} failed"))?;
    out.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<config::UsageError>().is_some() {
                eprintln!();
                eprintln!("{}", Cli::command().render_usage());
            }
            ExitCode::from(2)
        }
    }
}
