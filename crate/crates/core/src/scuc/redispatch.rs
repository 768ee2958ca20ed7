use super::{Schedule, ScucError};
use crate::model::{NetworkModel, Realization, SystemCase};
use crate::optkernel::{solve_lp, LinearProgram, Sense, Status};

/// $/MW charged on line-overload and balance slack in the re-dispatch LP.
pub const SHORTFALL_PENALTY: f64 = 1000.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Redispatch {
    pub dispatch: Vec<f64>,
    /// Energy cost of committed units, excluding no-load.
    pub energy_cost: f64,
    /// Total slack MW (line + balance) that could not be covered.
    pub shortfall: f64,
}

impl Redispatch {
    pub fn cost(&self) -> f64 {
        self.energy_cost + SHORTFALL_PENALTY * self.shortfall
    }
}

/// Least-cost corrective dispatch at hour `t` with the commitment fixed:
/// each committed unit moves within its ten-minute band around the schedule
/// and its limits, subject to balance and line flows.
pub fn redispatch(
    net: &NetworkModel,
    case: &SystemCase,
    schedule: &Schedule,
    point: &Realization,
    t: usize,
) -> Result<Redispatch, ScucError> {
    let p_hat = schedule.dispatch_at(t);
    let on = schedule.commitment_at(t);
    let mut lp = LinearProgram::new();
    let mut segs: Vec<Vec<usize>> = Vec::with_capacity(case.num_units());
    for (i, u) in case.units.iter().enumerate() {
        let mut cols = Vec::new();
        if on[i] {
            for (k, &(w, mc)) in u.segments_above_min().iter().enumerate() {
                cols.push(lp.add_var(format!("g_{}_{}", u.id, k + 1), mc, 0.0, w));
            }
            let terms: Vec<(usize, f64)> = cols.iter().map(|&j| (j, 1.0)).collect();
            let hi = (p_hat[i] + u.corrective_up()).min(u.p_max) - u.p_min;
            let lo = (p_hat[i] - u.corrective_dn()).max(u.p_min) - u.p_min;
            lp.add_constraint(format!("hi_{}", u.id), terms.clone(), Sense::Le, hi);
            lp.add_constraint(format!("lo_{}", u.id), terms, Sense::Ge, lo);
        }
        segs.push(cols);
    }
    let s = lp.add_var("s", SHORTFALL_PENALTY, 0.0, f64::INFINITY);
    let s1 = lp.add_var("s1", SHORTFALL_PENALTY, 0.0, f64::INFINITY);
    let s2 = lp.add_var("s2", SHORTFALL_PENALTY, 0.0, f64::INFINITY);

    let p_min_fixed: Vec<f64> = case
        .units
        .iter()
        .zip(&on)
        .map(|(u, &c)| if c { u.p_min } else { 0.0 })
        .collect();
    let base_flows = net.flows(&net.injection(&p_min_fixed, &point.load, &point.wind));
    for l in 0..net.num_lines() {
        let sf = net.unit_factors(l);
        let mut fwd = Vec::new();
        for (i, cols) in segs.iter().enumerate() {
            if sf[i] != 0.0 {
                fwd.extend(cols.iter().map(|&j| (j, sf[i])));
            }
        }
        let mut rev: Vec<(usize, f64)> = fwd.iter().map(|&(j, c)| (j, -c)).collect();
        fwd.push((s, -1.0));
        rev.push((s, -1.0));
        let lim = net.flow_limits[l];
        lp.add_constraint(format!("up_{l}"), fwd, Sense::Le, lim - base_flows[l]);
        lp.add_constraint(format!("dn_{l}"), rev, Sense::Le, lim + base_flows[l]);
    }
    let mut bal: Vec<(usize, f64)> = segs.iter().flatten().map(|&j| (j, 1.0)).collect();
    bal.push((s1, 1.0));
    bal.push((s2, -1.0));
    let demand = point.load.iter().sum::<f64>()
        - point.wind.iter().sum::<f64>()
        - p_min_fixed.iter().sum::<f64>();
    lp.add_constraint("balance", bal, Sense::Eq, demand);

    let sol = solve_lp(&lp)?;
    if sol.status != Status::Optimal {
        return Err(ScucError::Subproblem {
            kind: "redispatch",
            hour: t + 1,
            status: sol.status,
        });
    }
    let dispatch: Vec<f64> = segs
        .iter()
        .zip(&p_min_fixed)
        .map(|(cols, &pm)| pm + cols.iter().map(|&j| sol.primal[j]).sum::<f64>())
        .collect();
    let energy_cost = case
        .units
        .iter()
        .enumerate()
        .filter(|(i, _)| on[*i])
        .map(|(i, u)| u.energy_cost(dispatch[i]))
        .sum();
    Ok(Redispatch {
        dispatch,
        energy_cost,
        shortfall: sol.primal[s] + sol.primal[s1] + sol.primal[s2],
    })
}
