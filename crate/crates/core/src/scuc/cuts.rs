use serde::Serialize;

use super::{CheckKind, CheckResult, Schedule, ScucError};
use crate::model::{NetworkModel, SystemCase};

/// Affine inequality `sum_i p_coef[i] P_it + i_coef[i] I_it + constant <= 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BendersCut {
    pub hour: usize,
    pub kind: CheckKind,
    pub p_coef: Vec<f64>,
    pub i_coef: Vec<f64>,
    pub constant: f64,
    pub iteration: usize,
}

impl BendersCut {
    /// Left-hand side at a schedule.
    pub fn evaluate(&self, schedule: &Schedule) -> f64 {
        let p = schedule.dispatch_at(self.hour);
        let on = schedule.commitment_at(self.hour);
        let mut v = self.constant;
        for i in 0..p.len() {
            v += self.p_coef[i] * p[i] + self.i_coef[i] * if on[i] { 1.0 } else { 0.0 };
        }
        v
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = self.constant.abs().max(1.0);
        self.p_coef
            .iter()
            .chain(&self.i_coef)
            .all(|c| c.abs() <= 1e-12 * scale)
    }

    /// Builds the cut from slopes and the value at the producing schedule.
    fn anchored(
        hour: usize,
        kind: CheckKind,
        p_coef: Vec<f64>,
        i_coef: Vec<f64>,
        value: f64,
        schedule: &Schedule,
    ) -> Self {
        let mut cut = BendersCut {
            hour,
            kind,
            p_coef,
            i_coef,
            constant: 0.0,
            iteration: 0,
        };
        cut.constant = value - cut.evaluate(schedule);
        cut
    }
}

/// Feasibility cut from a violated network check: the linearized overload
/// in dispatch space must vanish.
pub fn make_network_cut(
    result: &CheckResult,
    net: &NetworkModel,
    schedule: &Schedule,
) -> Result<BendersCut, ScucError> {
    if !result.violated {
        return Err(ScucError::NotViolated {
            hour: result.hour + 1,
        });
    }
    let ng = net.unit_bus.len();
    let mut p_coef = vec![0.0; ng];
    for (l, &(l1, l2)) in result.line_duals.iter().enumerate() {
        let diff = l1 - l2;
        if diff == 0.0 {
            continue;
        }
        for (i, sf) in net.unit_factors(l).into_iter().enumerate() {
            p_coef[i] -= diff * sf;
        }
    }
    let cut = BendersCut::anchored(
        result.hour,
        CheckKind::Network,
        p_coef,
        vec![0.0; ng],
        result.objective,
        schedule,
    );
    if cut.is_degenerate() {
        return Err(ScucError::DegenerateCut {
            hour: result.hour + 1,
            violation: result.objective,
        });
    }
    Ok(cut)
}

/// Expected-feasibility cut from weighted scenario checks at one hour: duals
/// and objectives are averaged with the given weights.
pub fn make_scenario_cut(
    results: &[(f64, CheckResult)],
    case: &SystemCase,
    schedule: &Schedule,
) -> Result<BendersCut, ScucError> {
    let total: f64 = results.iter().map(|(w, _)| w).sum();
    if results.is_empty() || (total - 1.0).abs() > 1e-9 {
        return Err(ScucError::WeightSum(total));
    }
    let hour = results[0].1.hour;
    let ng = case.num_units();
    let mut p_coef = vec![0.0; ng];
    let mut i_coef = vec![0.0; ng];
    let mut mean = 0.0;
    for (w, r) in results {
        mean += w * r.objective;
        for (i, u) in case.units.iter().enumerate() {
            let (l1, l2) = r.ramp_duals[i];
            let (m1, m2) = r.cap_duals[i];
            p_coef[i] += w * (l1 - l2);
            i_coef[i] +=
                w * (l1 * u.corrective_up() + l2 * u.corrective_dn() + m1 * u.p_max - m2 * u.p_min);
        }
    }
    if mean <= 0.0 {
        return Err(ScucError::NotViolated { hour: hour + 1 });
    }
    let cut = BendersCut::anchored(hour, CheckKind::Scenario, p_coef, i_coef, mean, schedule);
    if cut.is_degenerate() {
        return Err(ScucError::DegenerateCut {
            hour: hour + 1,
            violation: mean,
        });
    }
    Ok(cut)
}
