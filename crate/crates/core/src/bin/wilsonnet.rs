use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use wilsonnet::jobs::{self, IdentityJob};
use wilsonnet::report::{ExperimentReport, Outcome};
use wilsonnet::verify;

/// Spin networks and Wilson loops on compact matrix groups.
///
/// Each command reads a JSON job from INPUT (or stdin when INPUT is absent
/// or `-`) and writes a JSON report. The exit code is 0 when the report's
/// verdict is pass, 1 when it is fail, and 2 on invalid input.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// Seed for all random draws; trial t uses stream t of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Acceptance tolerance for the command's comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Number of trials (samples for `commutant`).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Longest word length for `separate`.
    #[arg(long, global = true)]
    max_len: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Haar-random configurations on a graph: {"kind", "graph"}.
    Sample { input: Option<PathBuf> },
    /// Wilson loops and their gauge invariance: {"kind", "graph", "loops", "values"?}.
    Eval { input: Option<PathBuf> },
    /// Compile one spin network and compare with direct contraction:
    /// {"kind", "signature", "diagram"}.
    Compile { input: Option<PathBuf> },
    /// A spin job or a sweep {"sweep": [{"kind", "trials", "max_edges", "max_degree"}]}.
    VerifyIdentities { input: Option<PathBuf> },
    /// Exact flip normalization over all pairings: {"kinds", "max_p", "literal"?}.
    VerifyDiagrams { input: Option<PathBuf> },
    /// Diagram span rank against commutant dimension: {"cases": [{"kind", "d"}]}.
    Commutant { input: Option<PathBuf> },
    /// Separation experiment on word fingerprints: {"kind", "r"}.
    Separate { input: Option<PathBuf> },
}

fn read_input(path: &Option<PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

struct Ctx {
    command: String,
    job: String,
    seed: u64,
    tol: f64,
    start: Instant,
    out: Option<PathBuf>,
}

impl Ctx {
    fn emit<R: Serialize, S: Serialize>(&self, outcome: Outcome<R, S>) -> CliResult<bool> {
        let report = ExperimentReport::new(self.command.clone(), &self.job, self.seed, self.tol, outcome, self.start.elapsed())?;
        let text = serde_json::to_string_pretty(&report)?;
        match &self.out {
            Some(p) => std::fs::write(p, text + "\n")?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.write_all(b"\n")?;
            }
        }
        Ok(report.passed())
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] wilsonnet::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn run(cli: Cli) -> CliResult<bool> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(wilsonnet::Error::MalformedJob(format!("--tol must be finite and nonnegative, got {}", cli.tol)).into());
    }
    if let Some(t) = cli.trials.filter(|&t| t > jobs::MAX_JOB_COUNT) {
        return Err(wilsonnet::Error::BoundExceeded(format!("--trials {t} exceeds {}", jobs::MAX_JOB_COUNT)).into());
    }
    let input = match &cli.command {
        Command::Sample { input }
        | Command::Eval { input }
        | Command::Compile { input }
        | Command::VerifyIdentities { input }
        | Command::VerifyDiagrams { input }
        | Command::Commutant { input }
        | Command::Separate { input } => input.clone(),
    };
    let job = read_input(&input)?;
    let ctx = Ctx {
        command: std::env::args().collect::<Vec<_>>().join(" "),
        job: job.clone(),
        seed: cli.seed,
        tol: cli.tol,
        start: Instant::now(),
        out: cli.out.clone(),
    };
    let (seed, tol) = (cli.seed, cli.tol);
    match cli.command {
        Command::Sample { .. } => {
            let j = jobs::parse_sample_job(&job)?;
            ctx.emit(verify::sample_configurations(&j, cli.trials.unwrap_or(1), tol, seed)?)
        }
        Command::Eval { .. } => {
            let j = jobs::parse_eval_job(&job)?;
            ctx.emit(verify::evaluate_loops(&j, cli.trials.unwrap_or(1), tol, seed)?)
        }
        Command::Compile { .. } => {
            let j = IdentityJob::Single(jobs::parse_spin_job(&job)?);
            ctx.emit(verify::run_identity_suite(&j, cli.trials.unwrap_or(1), tol, seed)?)
        }
        Command::VerifyIdentities { .. } => {
            let j = jobs::parse_identity_job(&job)?;
            ctx.emit(verify::run_identity_suite(&j, cli.trials.unwrap_or(20), tol, seed)?)
        }
        Command::VerifyDiagrams { .. } => {
            let j = jobs::parse_diagram_job(&job)?;
            ctx.emit(verify::verify_diagrams(&j)?)
        }
        Command::Commutant { .. } => {
            let j = jobs::parse_commutant_job(&job)?;
            let samples = cli.trials.or(j.samples).unwrap_or(4);
            ctx.emit(verify::commutant_check(&j, samples, seed)?)
        }
        Command::Separate { .. } => {
            let j = jobs::parse_separation_job(&job)?;
            let max_len = cli.max_len.or(j.max_len).unwrap_or(6);
            let trials = cli.trials.or(j.trials).unwrap_or(100);
            jobs::check_word_budget(j.r, max_len)?;
            ctx.emit(verify::separation_experiment(j.kind, j.r, max_len, trials, tol, seed)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wilsonnet: {e}");
            ExitCode::from(2)
        }
    }
}
