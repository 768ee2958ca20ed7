mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "scuc",
    version,
    about = "Stochastic security-constrained unit commitment"
)]
struct Cli {
    /// Print failures as a JSON object on stderr.
    #[arg(long, global = true)]
    error_json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one case and write the report and schedule.
    Solve(SolveArgs),
    /// CAI and ESC of a schedule under a fresh sample.
    Evaluate(EvaluateArgs),
    /// Deterministic, point-estimate and Monte-Carlo runs side by side.
    Benchmark(BenchmarkArgs),
    /// Write the bundled cases to disk.
    GenCase(GenCaseArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Det,
    Tpe,
    Mcs,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Case file, or the name of a bundled case.
    #[arg(long)]
    case: String,
    /// Raw Monte-Carlo sample size.
    #[arg(long, default_value_t = 10_000, value_parser = positive_usize)]
    n_samples: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Scenarios kept after reduction (mcs).
    #[arg(long, default_value_t = 200, value_parser = positive_usize)]
    n_reduced: usize,
    /// Slack threshold that triggers a cut, MW.
    #[arg(long, value_parser = positive_f64)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 50, value_parser = positive_usize)]
    max_iterations: usize,
    /// Write every master and subproblem LP under OUT/lp.
    #[arg(long)]
    lp_dump: bool,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sampling seed; keep it different from the one used to solve.
    #[arg(long, default_value_t = 1_000_003)]
    seed: u64,
    /// Schedule CSV to evaluate.
    #[arg(long)]
    schedule: PathBuf,
    /// Reference schedule CSV for ESC and the base CAI.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Ramp-band test only, without the network check.
    #[arg(long)]
    cai_aggregate_only: bool,
    #[arg(long, value_parser = positive_f64)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Reduced scenario counts for the Monte-Carlo runs; the largest is the
    /// reference for relative errors.
    #[arg(long, value_delimiter = ',', default_values_t = vec![50, 100, 200], value_parser = positive_usize)]
    sizes: Vec<usize>,
    #[arg(long, value_parser = positive_f64)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 50, value_parser = positive_usize)]
    max_iterations: usize,
    /// Add a wall-time column.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
pub struct GenCaseArgs {
    /// One bundled case; all of them when omitted.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let wants_json = std::env::args().any(|a| a == "--error-json");
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 1 && wants_json {
                report(&CliError::Usage(e.to_string()), true);
            } else {
                let _ = e.print();
            }
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Benchmark(a) => commands::benchmark(a),
        Command::GenCase(a) => commands::gen_case(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, cli.error_json);
            ExitCode::from(e.exit_code())
        }
    }
}

fn report(e: &CliError, json: bool) {
    if json {
        let v = serde_json::json!({
            "error": e.kind(),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        });
        eprintln!("{v}");
    } else {
        eprintln!("error: {e}");
    }
}
