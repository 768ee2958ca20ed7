use serde::Serialize;

use super::{Schedule, ScucError, EPSILON};
use crate::model::{NetworkModel, Realization, SystemCase};
use crate::optkernel::{solve_lp, LinearProgram, Sense, Solution, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Network,
    Scenario,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Network => "network",
            CheckKind::Scenario => "scenario",
        }
    }
}

/// Outcome of one hourly check. Duals are sensitivities of the objective to
/// each row's right-hand side (non-positive for binding `<=` rows).
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub hour: usize,
    pub kind: CheckKind,
    pub objective: f64,
    pub line_slack: f64,
    /// Balance slacks (shortfall, surplus); zero for network checks.
    pub balance_slack: (f64, f64),
    /// Per line: (upper-limit row, lower-limit row).
    pub line_duals: Vec<(f64, f64)>,
    /// Per unit: corrective ramp (up, down) rows; empty for network checks.
    pub ramp_duals: Vec<(f64, f64)>,
    /// Per unit: capacity (max, min) rows; empty for network checks.
    pub cap_duals: Vec<(f64, f64)>,
    /// Corrective dispatch; empty for network checks.
    pub corrective: Vec<f64>,
    pub violated: bool,
}

fn solved(lp: &LinearProgram, kind: &'static str, hour: usize) -> Result<Solution, ScucError> {
    let sol = solve_lp(lp)?;
    if sol.status != Status::Optimal {
        return Err(ScucError::Subproblem {
            kind,
            hour,
            status: sol.status,
        });
    }
    Ok(sol)
}

/// Minimum uniform relaxation of all line limits that makes the scheduled
/// dispatch at hour `t` (forecast load and wind) flow-feasible.
pub fn network_check(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    t: usize,
) -> Result<CheckResult, ScucError> {
    let (lp, rows) = network_lp(net, case, schedule, t);
    let sol = solved(&lp, "network", t + 1)?;
    let line_duals = rows
        .iter()
        .map(|&(a, b)| (sol.sensitivity(&lp, a), sol.sensitivity(&lp, b)))
        .collect();
    let obj = sol.objective.max(0.0);
    Ok(CheckResult {
        hour: t,
        kind: CheckKind::Network,
        objective: obj,
        line_slack: obj,
        balance_slack: (0.0, 0.0),
        line_duals,
        ramp_duals: vec![],
        cap_duals: vec![],
        corrective: vec![],
        violated: obj > EPSILON,
    })
}

/// The LP solved by [`network_check`].
pub fn network_subproblem(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    t: usize,
) -> LinearProgram {
    network_lp(net, case, schedule, t).0
}

fn network_lp(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    t: usize,
) -> (LinearProgram, Vec<(usize, usize)>) {
    let fc = case.forecast(t);
    let flows = net.flows(&net.injection(&schedule.dispatch_at(t), &fc.load, &fc.wind));
    let mut lp = LinearProgram::new();
    let s = lp.add_var("s", 1.0, 0.0, f64::INFINITY);
    let mut rows = Vec::with_capacity(net.num_lines());
    for (l, (&f, &lim)) in flows.iter().zip(&net.flow_limits).enumerate() {
        let a = lp.add_constraint(format!("up_{l}"), vec![(s, -1.0)], Sense::Le, lim - f);
        let b = lp.add_constraint(format!("dn_{l}"), vec![(s, -1.0)], Sense::Le, lim + f);
        rows.push((a, b));
    }
    (lp, rows)
}

/// Corrective re-dispatch feasibility at hour `t` for one realization:
/// minimum total of line-overload and balance slacks.
pub fn scenario_check(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    point: &Realization,
    t: usize,
) -> Result<CheckResult, ScucError> {
    let b = scenario_lp(net, case, schedule, point, t);
    let lp = &b.lp;
    let sol = solved(lp, "scenario", t + 1)?;
    let d = |r: usize| sol.sensitivity(lp, r);
    let obj = sol.objective.max(0.0);
    Ok(CheckResult {
        hour: t,
        kind: CheckKind::Scenario,
        objective: obj,
        line_slack: sol.primal[b.s],
        balance_slack: (sol.primal[b.s1], sol.primal[b.s2]),
        line_duals: b.line_rows.iter().map(|&(a, b)| (d(a), d(b))).collect(),
        ramp_duals: b.unit_rows.iter().map(|r| (d(r[0]), d(r[1]))).collect(),
        cap_duals: b.unit_rows.iter().map(|r| (d(r[2]), d(r[3]))).collect(),
        corrective: b.pc.iter().map(|&j| sol.primal[j]).collect(),
        violated: obj > EPSILON,
    })
}

/// The LP solved by [`scenario_check`].
pub fn scenario_subproblem(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    point: &Realization,
    t: usize,
) -> LinearProgram {
    scenario_lp(net, case, schedule, point, t).lp
}

struct ScenarioLp {
    lp: LinearProgram,
    pc: Vec<usize>,
    s: usize,
    s1: usize,
    s2: usize,
    line_rows: Vec<(usize, usize)>,
    unit_rows: Vec<[usize; 4]>,
}

fn scenario_lp(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    point: &Realization,
    t: usize,
) -> ScenarioLp {
    let ng = case.num_units();
    let fixed = net.fixed_flows(&point.load, &point.wind);
    let mut lp = LinearProgram::new();
    let pc: Vec<usize> = case
        .units
        .iter()
        .map(|u| {
            lp.add_var(
                format!("pc_{}", u.id),
                0.0,
                f64::NEG_INFINITY,
                f64::INFINITY,
            )
        })
        .collect();
    let s = lp.add_var("s", 1.0, 0.0, f64::INFINITY);
    let s1 = lp.add_var("s1", 1.0, 0.0, f64::INFINITY);
    let s2 = lp.add_var("s2", 1.0, 0.0, f64::INFINITY);

    let mut line_rows = Vec::with_capacity(net.num_lines());
    for l in 0..net.num_lines() {
        let sf = net.unit_factors(l);
        let mut fwd: Vec<(usize, f64)> = pc
            .iter()
            .zip(&sf)
            .filter(|(_, c)| **c != 0.0)
            .map(|(&j, &c)| (j, c))
            .collect();
        let mut rev: Vec<(usize, f64)> = fwd.iter().map(|&(j, c)| (j, -c)).collect();
        fwd.push((s, -1.0));
        rev.push((s, -1.0));
        let lim = net.flow_limits[l];
        let a = lp.add_constraint(format!("up_{l}"), fwd, Sense::Le, lim - fixed[l]);
        let b = lp.add_constraint(format!("dn_{l}"), rev, Sense::Le, lim + fixed[l]);
        line_rows.push((a, b));
    }
    let mut bal: Vec<(usize, f64)> = pc.iter().map(|&j| (j, 1.0)).collect();
    bal.push((s1, 1.0));
    bal.push((s2, -1.0));
    let demand: f64 = point.load.iter().sum::<f64>() - point.wind.iter().sum::<f64>();
    lp.add_constraint("balance", bal, Sense::Eq, demand);

    let p_hat = schedule.dispatch_at(t);
    let on = schedule.commitment_at(t);
    let mut unit_rows = Vec::with_capacity(ng);
    for (i, u) in case.units.iter().enumerate() {
        let ii = if on[i] { 1.0 } else { 0.0 };
        let r1 = lp.add_constraint(
            format!("rup_{}", u.id),
            vec![(pc[i], 1.0)],
            Sense::Le,
            p_hat[i] + u.corrective_up() * ii,
        );
        let r2 = lp.add_constraint(
            format!("rdn_{}", u.id),
            vec![(pc[i], -1.0)],
            Sense::Le,
            -p_hat[i] + u.corrective_dn() * ii,
        );
        let r3 = lp.add_constraint(
            format!("pmax_{}", u.id),
            vec![(pc[i], 1.0)],
            Sense::Le,
            u.p_max * ii,
        );
        let r4 = lp.add_constraint(
            format!("pmin_{}", u.id),
            vec![(pc[i], -1.0)],
            Sense::Le,
            -u.p_min * ii,
        );
        unit_rows.push([r1, r2, r3, r4]);
    }
    ScenarioLp {
        lp,
        pc,
        s,
        s1,
        s2,
        line_rows,
        unit_rows,
    }
}
