use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use scuc_core::driver::{
    solve_deterministic, solve_stochastic_mcs, solve_stochastic_tpe, DriverError, DriverOptions,
    SolveReport,
};
use scuc_core::eval::{evaluate as evaluate_schedule, CaiOptions, EvalError};
use scuc_core::model::{
    bundled_case, bundled_case_json, compute_shift_factors, load_case, ModelError, SystemCase,
    BUNDLED_CASES,
};
use scuc_core::scuc::{Schedule, EPSILON};
use scuc_core::stochastic::sample;
use thiserror::Error;

use crate::{BenchmarkArgs, CommonArgs, EvaluateArgs, GenCaseArgs, ModeArg, SolveArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("writing {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Model(_) => "model",
            CliError::Input { .. } => "input",
            CliError::Write { .. } => "io",
            CliError::Driver(_) => "solver",
            CliError::Eval(_) => "evaluation",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Driver(
                DriverError::Model(_)
                | DriverError::Pem(_)
                | DriverError::Stochastic(_)
                | DriverError::Io { .. },
            ) => 1,
            CliError::Driver(_) => 2,
            CliError::Eval(EvalError::Scuc(_)) => 2,
            _ => 1,
        }
    }
}

fn load(arg: &str) -> Result<SystemCase, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_case(path)?);
    }
    let name = arg.strip_suffix(".case").unwrap_or(arg);
    if bundled_case_json(name).is_some() {
        return Ok(bundled_case(name)?);
    }
    Err(CliError::Input {
        path: arg.into(),
        message: format!(
            "no such file and not a bundled case ({})",
            BUNDLED_CASES.join(", ")
        ),
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, contents))
        .map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    Ok(path)
}

fn read_schedule(case: &SystemCase, path: &Path) -> Result<Schedule, CliError> {
    let input = |message: String| CliError::Input {
        path: path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| input(e.to_string()))?;
    Schedule::from_csv(case, &text).map_err(input)
}

fn options(
    common: &CommonArgs,
    seed: u64,
    n_reduced: usize,
    epsilon: Option<f64>,
    max_iterations: usize,
) -> DriverOptions {
    DriverOptions {
        max_iterations,
        epsilon: epsilon.unwrap_or(EPSILON),
        n_samples: common.n_samples,
        n_reduced,
        seed,
        lp_dump: None,
    }
}

fn run_mode(
    case: &SystemCase,
    mode: ModeArg,
    opts: &DriverOptions,
) -> Result<SolveReport, DriverError> {
    match mode {
        ModeArg::Det => solve_deterministic(case, opts),
        ModeArg::Tpe => solve_stochastic_tpe(case, opts),
        ModeArg::Mcs => solve_stochastic_mcs(case, opts),
    }
}

pub fn solve(a: &SolveArgs) -> Result<(), CliError> {
    let case = load(&a.common.case)?;
    let mut opts = options(&a.common, a.seed, a.n_reduced, a.epsilon, a.max_iterations);
    if a.lp_dump {
        opts.lp_dump = Some(a.common.out.join("lp"));
    }
    let mut report = run_mode(&case, a.mode, &opts)?;
    if !a.timings {
        report.wall_time_s = None;
    }
    let label = report.mode.label();
    let out = &a.common.out;
    let json = write(out, &format!("{label}_report.json"), &report.to_json())?;
    let csv = write(
        out,
        &format!("{label}_schedule.csv"),
        &report.schedule.to_csv(&case),
    )?;
    println!(
        "{label}: {} iteration(s), {} network cut(s), {} scenario cut(s)",
        report.iterations, report.cuts.network, report.cuts.scenario
    );
    println!(
        "schedule cost {:.2}, expected cost {:.2} (std {:.2})",
        report.schedule_cost, report.expected_cost, report.cost_std
    );
    if let Some(s) = report.wall_time_s {
        println!("wall time {s:.3} s");
    }
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

pub fn evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let case = load(&a.common.case)?;
    let net = compute_shift_factors(&case)?;
    let schedule = read_schedule(&case, &a.schedule)?;
    let base = a
        .base
        .as_deref()
        .map(|p| read_schedule(&case, p))
        .transpose()?;
    let set = sample(&case, a.common.n_samples, a.seed);
    let opts = CaiOptions {
        aggregate_only: a.cai_aggregate_only,
        epsilon: a.epsilon.unwrap_or(EPSILON),
    };
    let report = evaluate_schedule(&case, &net, &schedule, base.as_ref(), &set, &opts)?;
    let out = &a.common.out;
    let json = write(out, "evaluation.json", &report.to_json())?;
    let csv = write(out, "hourly_violation.csv", &report.hourly_csv())?;
    println!(
        "CAI {:.4}% over {} samples (seed {})",
        100.0 * report.cai,
        report.samples,
        report.seed
    );
    if let (Some(cb), Some(esc)) = (report.cai_base, report.esc) {
        println!("base CAI {:.4}%, ESC {:.4}%", 100.0 * cb, 100.0 * esc);
    }
    println!(
        "half-sample CAI {:.4}% / {:.4}% ({})",
        100.0 * report.half_sample.first,
        100.0 * report.half_sample.second,
        if report.half_sample.stable {
            "stable"
        } else {
            "unstable"
        }
    );
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

struct Row {
    method: &'static str,
    scenarios: usize,
    report: SolveReport,
}

pub fn benchmark(a: &BenchmarkArgs) -> Result<(), CliError> {
    let case = load(&a.common.case)?;
    let mut sizes = a.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let reference = *sizes
        .last()
        .ok_or_else(|| CliError::Usage("--sizes must not be empty".into()))?;

    let base = options(&a.common, a.seed, reference, a.epsilon, a.max_iterations);
    let mut rows = Vec::new();
    let det = run_mode(&case, ModeArg::Det, &base)?;
    rows.push(Row {
        method: "det",
        scenarios: 1,
        report: det,
    });
    let tpe = run_mode(&case, ModeArg::Tpe, &base)?;
    rows.push(Row {
        method: "tpe",
        scenarios: tpe.evaluation_points,
        report: tpe,
    });
    for &s in &sizes {
        let opts = DriverOptions {
            n_reduced: s,
            ..base.clone()
        };
        rows.push(Row {
            method: "mcs",
            scenarios: s,
            report: run_mode(&case, ModeArg::Mcs, &opts)?,
        });
    }
    let ref_cost = rows.last().expect("mcs rows").report.expected_cost;

    let mut csv =
        String::from("method,scenarios,iterations,schedule_cost,expected_cost,relative_error_pct");
    if a.timings {
        csv.push_str(",wall_time_s");
    }
    csv.push('\n');
    let mut table = format!(
        "{:<7}{:>10}{:>7}{:>15}{:>15}{:>12}{}\n",
        "method",
        "scenarios",
        "iters",
        "schedule",
        "expected",
        "rel.err %",
        if a.timings { "     time s" } else { "" }
    );
    for r in &rows {
        let rel = 100.0 * (r.report.expected_cost - ref_cost).abs() / ref_cost;
        write!(
            csv,
            "{},{},{},{:.4},{:.4},{:.4}",
            r.method,
            r.scenarios,
            r.report.iterations,
            r.report.schedule_cost,
            r.report.expected_cost,
            rel
        )
        .unwrap();
        write!(
            table,
            "{:<7}{:>10}{:>7}{:>15.2}{:>15.2}{:>12.4}",
            r.method,
            r.scenarios,
            r.report.iterations,
            r.report.schedule_cost,
            r.report.expected_cost,
            rel
        )
        .unwrap();
        if a.timings {
            let t = r.report.wall_time_s.unwrap_or(f64::NAN);
            write!(csv, ",{t:.3}").unwrap();
            write!(table, "{t:>11.3}").unwrap();
        }
        csv.push('\n');
        table.push('\n');
    }
    print!("{table}");
    let path = write(&a.common.out, "benchmark.csv", &csv)?;
    println!(
        "relative errors against mcs with {reference} scenarios; wrote {}",
        path.display()
    );
    Ok(())
}

pub fn gen_case(a: &GenCaseArgs) -> Result<(), CliError> {
    let names: Vec<&str> = match &a.name {
        Some(n) => {
            let n = n.strip_suffix(".case").unwrap_or(n);
            if bundled_case_json(n).is_none() {
                return Err(CliError::Usage(format!(
                    "unknown case {n:?}; known: {}",
                    BUNDLED_CASES.join(", ")
                )));
            }
            vec![BUNDLED_CASES
                .iter()
                .copied()
                .find(|b| *b == n)
                .expect("checked")]
        }
        None => BUNDLED_CASES.to_vec(),
    };
    for n in names {
        let text = bundled_case_json(n).expect("bundled");
        let path = write(&a.out, &format!("{n}.case"), text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
