//! Out-of-sample evaluation of a schedule: corrective-action incapability
//! (CAI) over sampled days, and the extra no-load cost of added commitments
//! (ESC).

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{ModelError, NetworkModel, SystemCase};
use crate::scuc::{scenario_check, Schedule, ScucError, EPSILON};
use crate::stochastic::ScenarioSet;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("scenario set is empty")]
    Empty,
    #[error("scenario set has {got} variables, case has {expected}")]
    Shape { got: usize, expected: usize },
    #[error("schedule covers {got_units} units x {got_hours} hours, case has {units} x {hours}")]
    ScheduleShape {
        got_units: usize,
        got_hours: usize,
        units: usize,
        hours: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scuc(#[from] ScucError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaiOptions {
    /// Only the aggregate ramp band, no network check.
    pub aggregate_only: bool,
    pub epsilon: f64,
}

impl Default for CaiOptions {
    fn default() -> Self {
        CaiOptions {
            aggregate_only: false,
            epsilon: EPSILON,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaiResult {
    pub cai: f64,
    /// Probability mass of scenarios failing at each hour.
    pub hourly_violation: Vec<f64>,
    /// Per scenario: every hour correctable.
    #[serde(skip)]
    pub satisfied: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub cai: f64,
    pub cai_base: Option<f64>,
    pub esc: Option<f64>,
    pub hourly_violation: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub aggregate_only: bool,
    pub half_sample: HalfSampleCheck,
}

/// CAI on the two halves of the sample against the binomial standard error of
/// their difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfSampleCheck {
    pub first: f64,
    pub second: f64,
    pub standard_error: f64,
    pub stable: bool,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `hour,violation_probability`, hours 1-based.
    pub fn hourly_csv(&self) -> String {
        let mut out = String::from("hour,violation_probability\n");
        for (t, p) in self.hourly_violation.iter().enumerate() {
            out.push_str(&format!("{},{}\n", t + 1, p));
        }
        out
    }
}

fn check_shapes(case: &SystemCase, schedule: &Schedule) -> Result<(), EvalError> {
    let (units, hours) = (case.num_units(), case.num_hours());
    let got_units = schedule.committed.len();
    let got_hours = schedule.committed.first().map_or(0, |r| r.len());
    if got_units != units || got_hours != hours || schedule.dispatch.len() != units {
        return Err(EvalError::ScheduleShape {
            got_units,
            got_hours,
            units,
            hours,
        });
    }
    Ok(())
}

/// Whether hour `t` of one realization can be corrected.
fn hour_ok(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    deviates: &[f64],
    t: usize,
    opts: &CaiOptions,
) -> Result<bool, ScucError> {
    let point = case.realize(deviates, t);
    let need = point.load.iter().sum::<f64>() - point.wind.iter().sum::<f64>();
    let (mut scheduled, mut up, mut dn) = (0.0, 0.0, 0.0);
    for (i, u) in case.units.iter().enumerate() {
        if schedule.committed[i][t] {
            scheduled += schedule.dispatch[i][t];
            up += u.corrective_up();
            dn += u.corrective_dn();
        }
    }
    let change = need - scheduled;
    let tol = opts.epsilon;
    if change > up + tol || change < -dn - tol {
        return Ok(false);
    }
    if opts.aggregate_only {
        return Ok(true);
    }
    Ok(scenario_check(net, case, schedule, &point, t)?.objective <= tol)
}

pub fn cai(
    case: &SystemCase,
    net: &NetworkModel,
    schedule: &Schedule,
    scenarios: &ScenarioSet,
    opts: &CaiOptions,
) -> Result<CaiResult, EvalError> {
    if scenarios.is_empty() {
        return Err(EvalError::Empty);
    }
    let m = case.uncertain_variables().len();
    if scenarios.num_variables() != m {
        return Err(EvalError::Shape {
            got: scenarios.num_variables(),
            expected: m,
        });
    }
    check_shapes(case, schedule)?;
    let nt = case.num_hours();
    let per_scenario = scenarios
        .deviates
        .par_iter()
        .map(|d| {
            (0..nt)
                .map(|t| hour_ok(net, case, schedule, d, t, opts))
                .collect::<Result<Vec<bool>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut hourly = vec![0.0; nt];
    let mut satisfied_mass = 0.0;
    let mut satisfied = Vec::with_capacity(per_scenario.len());
    for (hours, &p) in per_scenario.iter().zip(&scenarios.probabilities) {
        let all = hours.iter().all(|&ok| ok);
        if all {
            satisfied_mass += p;
        }
        for (t, &ok) in hours.iter().enumerate() {
            if !ok {
                hourly[t] += p;
            }
        }
        satisfied.push(all);
    }
    let total: f64 = scenarios.probabilities.iter().sum();
    Ok(CaiResult {
        cai: (1.0 - satisfied_mass / total).clamp(0.0, 1.0),
        hourly_violation: hourly.into_iter().map(|h| h / total).collect(),
        satisfied,
    })
}

/// No-load cost of unit-hours committed in `new` but not in `base`, relative
/// to the total cost of `new`.
pub fn esc(case: &SystemCase, new: &Schedule, base: &Schedule) -> f64 {
    let mut extra = 0.0;
    for (i, u) in case.units.iter().enumerate() {
        for t in 0..case.num_hours() {
            if new.committed[i][t] && !base.committed[i][t] {
                extra += u.no_load_cost;
            }
        }
    }
    if extra == 0.0 {
        0.0
    } else {
        extra / new.total_cost
    }
}

/// Splits an equally weighted sample at its midpoint and compares the CAI of
/// the halves.
pub fn half_sample_check(result: &CaiResult, probabilities: &[f64]) -> HalfSampleCheck {
    let n = result.satisfied.len();
    let mid = n / 2;
    let part = |r: std::ops::Range<usize>| {
        let mass: f64 = probabilities[r.clone()].iter().sum();
        let bad: f64 = r
            .filter(|&k| !result.satisfied[k])
            .map(|k| probabilities[k])
            .sum();
        if mass > 0.0 {
            bad / mass + 0.0
        } else {
            0.0
        }
    };
    let (first, second) = (part(0..mid), part(mid..n));
    let p = result.cai;
    let standard_error =
        (p * (1.0 - p) * (1.0 / mid.max(1) as f64 + 1.0 / (n - mid).max(1) as f64)).sqrt();
    HalfSampleCheck {
        first,
        second,
        standard_error,
        stable: (first - second).abs() <= 3.0 * standard_error,
    }
}

/// Full report for `schedule`, optionally against a base schedule.
pub fn evaluate(
    case: &SystemCase,
    net: &NetworkModel,
    schedule: &Schedule,
    base: Option<&Schedule>,
    scenarios: &ScenarioSet,
    opts: &CaiOptions,
) -> Result<EvaluationReport, EvalError> {
    let res = cai(case, net, schedule, scenarios, opts)?;
    let (cai_base, esc_value) = match base {
        Some(b) => {
            check_shapes(case, b)?;
            (
                Some(cai(case, net, b, scenarios, opts)?.cai),
                Some(esc(case, schedule, b)),
            )
        }
        None => (None, None),
    };
    Ok(EvaluationReport {
        cai: res.cai,
        cai_base,
        esc: esc_value,
        hourly_violation: res.hourly_violation.clone(),
        samples: scenarios.len(),
        seed: scenarios.seed,
        aggregate_only: opts.aggregate_only,
        half_sample: half_sample_check(&res, &scenarios.probabilities),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bundled_case, compute_shift_factors};
    use crate::stochastic::Provenance;

    fn set(deviates: Vec<Vec<f64>>) -> ScenarioSet {
        let n = deviates.len();
        ScenarioSet {
            deviates,
            probabilities: vec![1.0 / n as f64; n],
            seed: 0,
            provenance: Provenance::Raw,
        }
    }

    #[test]
    fn esc_counts_only_added_unit_hours() {
        let case = bundled_case("tiny2").unwrap();
        let nt = case.num_hours();
        let base = Schedule::from_parts(
            &case,
            vec![vec![true; nt], vec![false; nt]],
            vec![vec![50.0; nt], vec![0.0; nt]],
        );
        assert_eq!(esc(&case, &base, &base), 0.0);
        let mut on = base.committed.clone();
        on[1][2] = true;
        let mut disp = base.dispatch.clone();
        disp[1][2] = case.units[1].p_min;
        let new = Schedule::from_parts(&case, on, disp);
        let want = case.units[1].no_load_cost / new.total_cost;
        assert!((esc(&case, &new, &base) - want).abs() < 1e-15);
        assert_eq!(esc(&case, &base, &new), 0.0);
    }

    #[test]
    fn empty_set_is_an_error() {
        let case = bundled_case("tiny2").unwrap();
        let net = compute_shift_factors(&case).unwrap();
        let nt = case.num_hours();
        let s = Schedule::from_parts(&case, vec![vec![true; nt]; 2], vec![vec![50.0; nt]; 2]);
        let empty = set(vec![]);
        assert!(matches!(
            cai(&case, &net, &s, &empty, &CaiOptions::default()),
            Err(EvalError::Empty)
        ));
    }
}
