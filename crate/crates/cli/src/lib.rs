//! The `fracvol` command line: simulation, pricing, surfaces, t-T field
//! curves and realisations, Monte Carlo validation and figure data.
//!
//! Every artifact carries the resolved configuration of the job that made
//! it; `fracvol replay <file>` re-runs that job and reproduces the file.

pub mod config;
mod correction;
mod error;
mod field;
mod figures;
pub mod output;
mod price;
mod simulate;
mod validate;

pub use config::RunConfig;
pub use error::CliError;

use clap::{Parser, Subcommand};
use output::Artifact;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "FRACVOL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fracvol",
    version,
    about = "Fractional stochastic volatility: pricing corrections, t-T field and Monte Carlo checks"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample stationary fOU paths on a uniform grid (CSV: time, z).
    #[command(allow_negative_numbers = true)]
    Simulate(simulate::SimulateArgs),
    /// Corrected prices and their decomposition from a sampled factor history.
    #[command(allow_negative_numbers = true)]
    Price(price::PriceArgs),
    /// Mean and ±1 sd implied-volatility (or price) correction over (τ/τ̄, K/X).
    #[command(allow_negative_numbers = true)]
    Ivsurface(correction::SurfaceArgs),
    /// Correlation curves or realisations of the t-T correction field.
    #[command(allow_negative_numbers = true)]
    Ttfield(field::FieldArgs),
    /// Monte Carlo convergence study of the corrected price.
    #[command(allow_negative_numbers = true)]
    Validate(validate::ValidateArgs),
    /// Data behind a numbered figure, with caption parameters preset.
    #[command(allow_negative_numbers = true)]
    Figures(figures::FigureArgs),
    /// Re-run the job recorded in an artifact produced by this program.
    Replay(ReplayArgs),
}

#[derive(Debug, clap::Args)]
struct ReplayArgs {
    /// Artifact whose header or `config` block is replayed.
    file: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A fully resolved unit of work, as recorded in artifact headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "kebab-case")]
pub enum Job {
    Simulate(simulate::SimulateConfig),
    Price(RunConfig),
    Ivsurface(correction::CorrectionConfig),
    Ttfield(field::FieldConfig),
    Validate(validate::ValidateConfig),
    Correlation(figures::CorrelationConfig),
    Figures(figures::FigureJob),
}

impl Job {
    fn name(&self) -> &'static str {
        match self {
            Job::Simulate(_) => "simulate",
            Job::Price(_) => "price",
            Job::Ivsurface(_) => "ivsurface",
            Job::Ttfield(_) => "ttfield",
            Job::Validate(_) => "validate",
            Job::Correlation(_) => "correlation",
            Job::Figures(_) => "figures",
        }
    }

    fn execute(&self) -> Result<Artifact, CliError> {
        match self {
            Job::Simulate(c) => simulate::execute(c),
            Job::Price(c) => price::execute(c),
            Job::Ivsurface(c) => correction::execute(c),
            Job::Ttfield(c) => field::execute(c),
            Job::Validate(c) => validate::execute(c),
            Job::Correlation(c) => figures::correlation(c),
            Job::Figures(c) => c.job.execute(),
        }
    }

    /// Runs the job and writes its artifact with the job embedded.
    pub fn run(&self, out: Option<&Path>) -> Result<(), CliError> {
        let artifact = self.execute()?;
        output::emit(out, &self.header_config(), self.name(), &artifact)
    }

    fn header_config(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("jobs serialise");
        v["config"].take()
    }

    fn from_parts(command: &str, config: serde_json::Value) -> Result<Self, CliError> {
        let doc = serde_json::json!({ "command": command, "config": config });
        serde_json::from_value(doc).map_err(|e| CliError::field("replay", e))
    }
}

fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let text =
        std::fs::read_to_string(&args.file).map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
    let (command, config) = output::recorded_job(&text)?;
    Job::from_parts(&command, config)?.run(args.out.as_deref())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::field(THREADS_VAR, format!("must be a positive integer, got {raw:?}")))?;
    // A pool may already exist when called twice in one process; the first cap wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => Job::Simulate(a.resolve()?).run(a.out.as_deref()),
        Command::Price(a) => {
            let cfg = a.resolve()?;
            let out = a.out.clone().or_else(|| cfg.output.path.clone());
            Job::Price(cfg).run(out.as_deref())
        }
        Command::Ivsurface(a) => Job::Ivsurface(a.resolve()?).run(a.out.as_deref()),
        Command::Ttfield(a) => Job::Ttfield(a.resolve()?).run(a.out.as_deref()),
        Command::Validate(a) => {
            let cfg = a.resolve()?;
            let out = a.out.clone().or_else(|| cfg.run.output.path.clone());
            Job::Validate(cfg).run(out.as_deref())
        }
        Command::Figures(a) => figures::job(a.fig, a.seed)?.run(a.out.as_deref()),
        Command::Replay(a) => replay(&a),
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code: 0 success, 1 computation failure,
/// 2 invalid input, 3 I/O failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let result = configure_threads().and_then(|_| dispatch(cli.command));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
