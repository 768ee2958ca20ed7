//! Benders loop: master commitment, hourly network checks, hourly scenario
//! checks over point-estimate concentrations or reduced Monte-Carlo
//! scenarios, cuts, repeat.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{compute_shift_factors, ModelError, NetworkModel, Realization, SystemCase};
use crate::optkernel::write_lp;
use crate::pem::{build_concentrations, estimate_moments, PemError};
use crate::scuc::{
    build_master, make_network_cut, make_scenario_cut, network_check, network_subproblem,
    redispatch, scenario_check, scenario_subproblem, solve_master, BendersCut, CheckKind, Schedule,
    ScucError, EPSILON,
};
use crate::stochastic::{deviate_moments, reduce, sample, StochasticError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deterministic,
    Tpe,
    Mcs,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Deterministic => "det",
            Mode::Tpe => "tpe",
            Mode::Mcs => "mcs",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DriverOptions {
    pub max_iterations: usize,
    pub epsilon: f64,
    pub n_samples: usize,
    pub n_reduced: usize,
    pub seed: u64,
    /// Directory receiving the master and every subproblem as LP text.
    pub lp_dump: Option<PathBuf>,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions {
            max_iterations: 50,
            epsilon: EPSILON,
            n_samples: 10_000,
            n_reduced: 200,
            seed: 1,
            lp_dump: None,
        }
    }
}

/// Weighted evaluation points in deviate space.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioPoints {
    pub weights: Vec<f64>,
    pub deviates: Vec<Vec<f64>>,
}

impl ScenarioPoints {
    pub fn none() -> Self {
        ScenarioPoints {
            weights: vec![],
            deviates: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The 2m concentrations; empty when no input is random.
    pub fn point_estimate(case: &SystemCase) -> Result<Self, PemError> {
        match build_concentrations(&deviate_moments(&case.uncertain_variables())) {
            Ok(c) => Ok(ScenarioPoints {
                weights: c.iter().map(|k| k.weight).collect(),
                deviates: c.into_iter().map(|k| k.point).collect(),
            }),
            Err(PemError::NoInputs) => Ok(Self::none()),
            Err(e) => Err(e),
        }
    }

    pub fn monte_carlo(
        case: &SystemCase,
        n_samples: usize,
        n_reduced: usize,
        seed: u64,
    ) -> Result<Self, StochasticError> {
        let raw = sample(case, n_samples, seed);
        let red = reduce(&raw, n_reduced)?;
        Ok(ScenarioPoints {
            weights: red.probabilities,
            deviates: red.deviates,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationSummary {
    pub iteration: usize,
    pub master_objective: f64,
    /// 1-based hours with a violated network check.
    pub network_violations: Vec<usize>,
    /// 1-based hours whose weighted mean scenario slack exceeded the threshold.
    pub scenario_violations: Vec<usize>,
    pub max_line_slack: f64,
    pub max_mean_scenario_slack: f64,
    pub subproblems: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutCounts {
    pub network: usize,
    pub scenario: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub schedule: Schedule,
    pub iterations: usize,
    pub history: Vec<IterationSummary>,
    pub cuts: CutCounts,
    /// Cost of the schedule at the forecast (objective of the master).
    pub schedule_cost: f64,
    /// Probability-weighted cost of re-dispatching the schedule at each
    /// evaluation point; equals `schedule_cost` without uncertainty.
    pub expected_cost: f64,
    pub cost_std: f64,
    pub evaluation_points: usize,
    pub subproblem_solves: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pem(#[from] PemError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error("iteration {iteration}: {source}")]
    Scuc {
        iteration: usize,
        #[source]
        source: ScucError,
    },
    #[error("no convergence within {} iterations", report.iterations)]
    MaxIterations { report: Box<SolveReport> },
    #[error("writing {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn dump(dir: &Path, name: String, lp: &crate::optkernel::LinearProgram) -> Result<(), DriverError> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, write_lp(lp)))
        .map_err(|source| DriverError::Io { path, source })
}

fn dump_iteration(
    dir: &Path,
    iteration: usize,
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    real: &[Vec<Realization>],
) -> Result<(), DriverError> {
    for (t, hour) in real.iter().enumerate() {
        dump(
            dir,
            format!("it{iteration}_h{}_network.lp", t + 1),
            &network_subproblem(net, case, schedule, t),
        )?;
        for (k, p) in hour.iter().enumerate() {
            let lp = scenario_subproblem(net, case, schedule, p, t);
            dump(
                dir,
                format!("it{iteration}_h{}_scenario{}.lp", t + 1, k + 1),
                &lp,
            )?;
        }
    }
    Ok(())
}

pub fn solve_deterministic(
    case: &SystemCase,
    opts: &DriverOptions,
) -> Result<SolveReport, DriverError> {
    run(
        case,
        Mode::Deterministic,
        &ScenarioPoints::none(),
        opts,
        Instant::now(),
    )
}

pub fn solve_stochastic_tpe(
    case: &SystemCase,
    opts: &DriverOptions,
) -> Result<SolveReport, DriverError> {
    let start = Instant::now();
    let points = ScenarioPoints::point_estimate(case)?;
    run(case, Mode::Tpe, &points, opts, start)
}

/// Samples, reduces and solves; the reported wall time includes sampling and
/// reduction.
pub fn solve_stochastic_mcs(
    case: &SystemCase,
    opts: &DriverOptions,
) -> Result<SolveReport, DriverError> {
    let start = Instant::now();
    let points = ScenarioPoints::monte_carlo(case, opts.n_samples, opts.n_reduced, opts.seed)?;
    run(case, Mode::Mcs, &points, opts, start)
}

fn realizations(case: &SystemCase, points: &ScenarioPoints) -> Vec<Vec<Realization>> {
    (0..case.num_hours())
        .map(|t| points.deviates.iter().map(|d| case.realize(d, t)).collect())
        .collect()
}

/// Runs the loop with the given evaluation points (empty = deterministic).
pub fn solve_with_points(
    case: &SystemCase,
    mode: Mode,
    points: &ScenarioPoints,
    opts: &DriverOptions,
) -> Result<SolveReport, DriverError> {
    run(case, mode, points, opts, Instant::now())
}

fn run(
    case: &SystemCase,
    mode: Mode,
    points: &ScenarioPoints,
    opts: &DriverOptions,
    start: Instant,
) -> Result<SolveReport, DriverError> {
    let net = compute_shift_factors(case)?;
    let nt = case.num_hours();
    let real = realizations(case, points);
    let mut cuts: Vec<BendersCut> = Vec::new();
    let mut history = Vec::new();
    let mut solves = 0usize;
    let mut last: Option<Schedule> = None;

    for iteration in 1..=opts.max_iterations {
        let wrap = |source| DriverError::Scuc { iteration, source };
        let mp = build_master(case, &cuts).map_err(wrap)?;
        let (schedule, sol) = solve_master(case, &mp).map_err(wrap)?;
        if let Some(dir) = &opts.lp_dump {
            dump(dir, format!("it{iteration}_master.lp"), &mp.lp)?;
            dump_iteration(dir, iteration, &net, case, &schedule, &real)?;
        }

        let net_results = (0..nt)
            .into_par_iter()
            .map(|t| network_check(&net, case, &schedule, t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(wrap)?;
        let scen_results = (0..nt)
            .into_par_iter()
            .map(|t| {
                real[t]
                    .iter()
                    .map(|p| scenario_check(&net, case, &schedule, p, t))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(wrap)?;
        let iter_solves = nt + nt * points.len();
        solves += iter_solves;

        let mut new_cuts = Vec::new();
        let mut summary = IterationSummary {
            iteration,
            master_objective: sol.objective,
            network_violations: vec![],
            scenario_violations: vec![],
            max_line_slack: 0.0,
            max_mean_scenario_slack: 0.0,
            subproblems: iter_solves,
        };
        for mut r in net_results {
            summary.max_line_slack = summary.max_line_slack.max(r.objective);
            r.violated = r.objective > opts.epsilon;
            if r.violated {
                summary.network_violations.push(r.hour + 1);
                new_cuts.push(make_network_cut(&r, &net, &schedule).map_err(wrap)?);
            }
        }
        for (t, results) in scen_results.into_iter().enumerate() {
            if results.is_empty() {
                continue;
            }
            let mean: f64 = points
                .weights
                .iter()
                .zip(&results)
                .map(|(w, r)| w * r.objective)
                .sum();
            summary.max_mean_scenario_slack = summary.max_mean_scenario_slack.max(mean);
            if mean > opts.epsilon {
                summary.scenario_violations.push(t + 1);
                let weighted: Vec<_> = points.weights.iter().copied().zip(results).collect();
                new_cuts.push(make_scenario_cut(&weighted, case, &schedule).map_err(wrap)?);
            }
        }
        history.push(summary);
        last = Some(schedule.clone());

        if new_cuts.is_empty() {
            let (expected_cost, cost_std) =
                expected_cost(case, &net, &schedule, points, &real).map_err(wrap)?;
            let count = |k: CheckKind| cuts.iter().filter(|c| c.kind == k).count();
            return Ok(SolveReport {
                mode,
                schedule_cost: schedule.total_cost,
                schedule,
                iterations: iteration,
                history,
                cuts: CutCounts {
                    network: count(CheckKind::Network),
                    scenario: count(CheckKind::Scenario),
                },
                expected_cost,
                cost_std,
                evaluation_points: points.len(),
                subproblem_solves: solves,
                wall_time_s: Some(start.elapsed().as_secs_f64()),
            });
        }
        for c in &mut new_cuts {
            c.iteration = iteration;
        }
        cuts.extend(new_cuts);
    }

    let schedule = last.expect("at least one iteration");
    let count = |k: CheckKind| cuts.iter().filter(|c| c.kind == k).count();
    Err(DriverError::MaxIterations {
        report: Box::new(SolveReport {
            mode,
            schedule_cost: schedule.total_cost,
            schedule,
            iterations: opts.max_iterations,
            history,
            cuts: CutCounts {
                network: count(CheckKind::Network),
                scenario: count(CheckKind::Scenario),
            },
            expected_cost: f64::NAN,
            cost_std: f64::NAN,
            evaluation_points: points.len(),
            subproblem_solves: solves,
            wall_time_s: Some(start.elapsed().as_secs_f64()),
        }),
    })
}

/// Mean and standard deviation of the total cost over the evaluation points:
/// fixed costs plus per-hour least-cost corrective re-dispatch.
fn expected_cost(
    case: &SystemCase,
    net: &NetworkModel,
    schedule: &Schedule,
    points: &ScenarioPoints,
    real: &[Vec<Realization>],
) -> Result<(f64, f64), ScucError> {
    if points.is_empty() {
        return Ok((schedule.total_cost, 0.0));
    }
    let fixed = schedule.fixed_cost(case);
    let per_point = (0..points.len())
        .into_par_iter()
        .map(|k| {
            let mut c = fixed;
            for (t, hour) in real.iter().enumerate() {
                c += redispatch(net, case, schedule, &hour[k], t)?.cost();
            }
            Ok(c)
        })
        .collect::<Result<Vec<f64>, ScucError>>()?;
    let total: f64 = points.weights.iter().sum();
    let evals: Vec<(f64, Vec<f64>)> = points
        .weights
        .iter()
        .zip(per_point)
        .map(|(w, c)| (w / total, vec![c]))
        .collect();
    let est = estimate_moments(&evals, 2).expect("normalized weights");
    Ok((est.mean[0], est.std[0]))
}
