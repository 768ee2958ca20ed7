use std::collections::BTreeMap;

use super::{BendersCut, Schedule, ScucError};
use crate::model::SystemCase;
use crate::optkernel::{solve_milp, LinearProgram, MilpOptions, Sense, Solution, Status};

/// Linear expression over master columns plus a constant.
#[derive(Clone, Debug, Default)]
pub(super) struct Expr {
    terms: BTreeMap<usize, f64>,
    constant: f64,
}

impl Expr {
    pub(super) fn add(&mut self, j: usize, c: f64) -> &mut Self {
        *self.terms.entry(j).or_insert(0.0) += c;
        self
    }

    pub(super) fn add_expr(&mut self, other: &Expr, scale: f64) -> &mut Self {
        for (&j, &c) in &other.terms {
            self.add(j, scale * c);
        }
        self.constant += scale * other.constant;
        self
    }

    pub(super) fn push(
        self,
        lp: &mut LinearProgram,
        name: String,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        let terms = self.terms.into_iter().filter(|&(_, c)| c != 0.0).collect();
        lp.add_constraint(name, terms, sense, rhs - self.constant)
    }
}

/// Column indices of one unit-hour.
#[derive(Clone, Debug)]
pub struct UnitHourCols {
    pub commit: usize,
    pub segments: Vec<usize>,
    pub startup: usize,
    pub spinning: Option<usize>,
}

/// The master MILP together with its column map (`cols[unit][hour]`).
#[derive(Clone, Debug)]
pub struct MasterProblem {
    pub lp: LinearProgram,
    pub cols: Vec<Vec<UnitHourCols>>,
}

impl MasterProblem {
    pub(super) fn commit(&self, case: &SystemCase, i: usize, t: usize) -> Expr {
        let mut e = Expr::default();
        if t == usize::MAX {
            e.constant = if case.units[i].initial_status.is_on() {
                1.0
            } else {
                0.0
            };
        } else {
            e.add(self.cols[i][t].commit, 1.0);
        }
        e
    }

    /// Dispatch P_it = p_min I_it + sum of segment outputs; `t == usize::MAX`
    /// means the initial condition.
    pub(super) fn dispatch(&self, case: &SystemCase, i: usize, t: usize) -> Expr {
        let u = &case.units[i];
        let mut e = Expr::default();
        if t == usize::MAX {
            e.constant = if u.initial_status.is_on() {
                u.initial_status.output_mw
            } else {
                0.0
            };
            return e;
        }
        let c = &self.cols[i][t];
        e.add(c.commit, u.p_min);
        for &g in &c.segments {
            e.add(g, 1.0);
        }
        e
    }

    /// Shutdown indicator w = v_t - I_t + I_{t-1}.
    fn shutdown(&self, case: &SystemCase, i: usize, t: usize) -> Expr {
        let mut e = Expr::default();
        e.add(self.cols[i][t].startup, 1.0);
        e.add(self.cols[i][t].commit, -1.0);
        e.add_expr(&self.commit(case, i, prev(t)), 1.0);
        e
    }

    pub fn add_cut(&mut self, case: &SystemCase, cut: &BendersCut, name: String) {
        let mut e = Expr::default();
        for i in 0..case.num_units() {
            let p = self.dispatch(case, i, cut.hour);
            e.add_expr(&p, cut.p_coef[i]);
            e.add(self.cols[i][cut.hour].commit, cut.i_coef[i]);
        }
        e.constant += cut.constant;
        e.push(&mut self.lp, name, Sense::Le, 0.0);
    }

    pub fn schedule(&self, case: &SystemCase, sol: &Solution) -> Schedule {
        let (ng, nt) = (case.num_units(), case.num_hours());
        let x = &sol.primal;
        let mut committed = vec![vec![false; nt]; ng];
        let mut dispatch = vec![vec![0.0; nt]; ng];
        let mut spinning = vec![vec![0.0; nt]; ng];
        for (i, u) in case.units.iter().enumerate() {
            for t in 0..nt {
                let c = &self.cols[i][t];
                let on = x[c.commit] > 0.5;
                committed[i][t] = on;
                if on {
                    let g: f64 = c.segments.iter().map(|&j| x[j]).sum();
                    dispatch[i][t] = (u.p_min + g).clamp(u.p_min, u.p_max);
                    spinning[i][t] = c.spinning.map_or(0.0, |j| x[j].max(0.0));
                }
            }
        }
        let mut s = Schedule::from_parts(case, committed, dispatch);
        s.spinning = spinning;
        s
    }
}

fn prev(t: usize) -> usize {
    if t == 0 {
        usize::MAX
    } else {
        t - 1
    }
}

/// Hours at which a unit's commitment is forced by its initial status.
fn forced_status(case: &SystemCase, i: usize) -> Vec<Option<bool>> {
    let u = &case.units[i];
    let h = u.initial_status.hours;
    let (len, on) = if h > 0 {
        ((u.min_on as i64 - h as i64).max(0) as usize, true)
    } else {
        ((u.min_off as i64 + h as i64).max(0) as usize, false)
    };
    (0..case.num_hours())
        .map(|t| (t < len).then_some(on))
        .collect()
}

/// Rejects cases whose reserve requirements exceed what the fleet can supply.
pub fn precheck(case: &SystemCase) -> Result<(), ScucError> {
    let forced: Vec<_> = (0..case.num_units())
        .map(|i| forced_status(case, i))
        .collect();
    for t in 0..case.num_hours() {
        let avail = |f: &dyn Fn(usize) -> f64| -> f64 {
            (0..case.num_units())
                .filter(|&i| forced[i][t] != Some(false))
                .map(f)
                .sum()
        };
        let cap = avail(&|i| case.units[i].p_max);
        let net = case.net_load(t);
        let (rs, ro) = (case.reserves.spinning[t], case.reserves.operating[t]);
        let need = net + rs.max(ro);
        if cap + 1e-9 < need {
            return Err(ScucError::StructurallyInfeasible {
                hour: t + 1,
                message: format!(
                    "available capacity {cap:.3} MW < net load {net:.3} MW + reserve {:.3} MW",
                    rs.max(ro)
                ),
            });
        }
        let spin = avail(&|i| case.units[i].corrective_up());
        if spin + 1e-9 < rs {
            return Err(ScucError::StructurallyInfeasible {
                hour: t + 1,
                message: format!(
                    "spinning requirement {rs:.3} MW exceeds fleet ten-minute ramp {spin:.3} MW"
                ),
            });
        }
    }
    Ok(())
}

/// Builds the master MILP: cost, balance at forecast, reserves, ramps,
/// minimum up/down windows, generation limits and the supplied cuts.
pub fn build_master(case: &SystemCase, cuts: &[BendersCut]) -> Result<MasterProblem, ScucError> {
    precheck(case)?;
    let (ng, nt) = (case.num_units(), case.num_hours());
    let mut lp = LinearProgram::new();
    let with_spin = case.reserves.spinning.iter().any(|&r| r > 0.0);
    let mut cols = Vec::with_capacity(ng);
    for (i, u) in case.units.iter().enumerate() {
        let forced = forced_status(case, i);
        let mut row = Vec::with_capacity(nt);
        for t in 0..nt {
            let commit = lp.add_binary(
                format!("I_{}_{}", u.id, t + 1),
                u.no_load_cost + u.energy_cost(u.p_min),
            );
            if let Some(on) = forced[t] {
                let v = if on { 1.0 } else { 0.0 };
                lp.lower[commit] = v;
                lp.upper[commit] = v;
            }
            let segments = u
                .segments_above_min()
                .iter()
                .enumerate()
                .map(|(k, &(w, mc))| {
                    lp.add_var(format!("g_{}_{}_{}", u.id, t + 1, k + 1), mc, 0.0, w)
                })
                .collect();
            let startup = lp.add_var(
                format!("v_{}_{}", u.id, t + 1),
                u.startup_cost + u.shutdown_cost,
                0.0,
                1.0,
            );
            let spinning = with_spin.then(|| {
                lp.add_var(
                    format!("rs_{}_{}", u.id, t + 1),
                    0.0,
                    0.0,
                    u.corrective_up(),
                )
            });
            row.push(UnitHourCols {
                commit,
                segments,
                startup,
                spinning,
            });
        }
        cols.push(row);
    }
    let mut mp = MasterProblem { lp, cols };

    // shutdown cost sd * (v - I_t + I_{t-1}): the v part is on the startup
    // column, the rest goes on commitments and the constant offset
    for (i, u) in case.units.iter().enumerate() {
        if u.shutdown_cost == 0.0 {
            continue;
        }
        for t in 0..nt {
            mp.lp.objective[mp.cols[i][t].commit] -= u.shutdown_cost;
            if t == 0 {
                if u.initial_status.is_on() {
                    mp.lp.objective_offset += u.shutdown_cost;
                }
            } else {
                mp.lp.objective[mp.cols[i][t - 1].commit] += u.shutdown_cost;
            }
        }
    }

    for (i, u) in case.units.iter().enumerate() {
        let id = u.id;
        let exact_transitions = u.p_min > u.ramp_up.min(u.ramp_down);
        for t in 0..nt {
            let c = mp.cols[i][t].clone();
            let h = t + 1;
            let mut cap = Expr::default();
            for &g in &c.segments {
                cap.add(g, 1.0);
            }
            cap.add(c.commit, -(u.p_max - u.p_min));
            cap.push(&mut mp.lp, format!("cap_{id}_{h}"), Sense::Le, 0.0);

            let w = mp.shutdown(case, i, t);
            w.clone()
                .push(&mut mp.lp, format!("sd_{id}_{h}"), Sense::Ge, 0.0);

            let p_now = mp.dispatch(case, i, t);
            let p_prev = mp.dispatch(case, i, prev(t));
            let mut up = Expr::default();
            up.add_expr(&p_now, 1.0)
                .add_expr(&p_prev, -1.0)
                .add(c.startup, -(u.p_min - u.ramp_up));
            up.push(&mut mp.lp, format!("rup_{id}_{h}"), Sense::Le, u.ramp_up);
            let mut dn = Expr::default();
            dn.add_expr(&p_prev, 1.0)
                .add_expr(&p_now, -1.0)
                .add_expr(&w, -(u.p_min - u.ramp_down));
            dn.push(&mut mp.lp, format!("rdn_{id}_{h}"), Sense::Le, u.ramp_down);

            if exact_transitions {
                let mut a = Expr::default();
                a.add(c.startup, 1.0).add(c.commit, -1.0);
                a.push(&mut mp.lp, format!("von_{id}_{h}"), Sense::Le, 0.0);
                let mut b = Expr::default();
                b.add(c.startup, 1.0)
                    .add_expr(&mp.commit(case, i, prev(t)), 1.0);
                b.push(&mut mp.lp, format!("voff_{id}_{h}"), Sense::Le, 1.0);
            }

            if u.min_on > 1 {
                let mut e = Expr::default();
                for tau in t.saturating_sub(u.min_on as usize - 1)..=t {
                    e.add(mp.cols[i][tau].startup, 1.0);
                }
                e.add(c.commit, -1.0);
                e.push(&mut mp.lp, format!("minon_{id}_{h}"), Sense::Le, 0.0);
            }
            if u.min_off > 1 {
                let mut e = Expr::default();
                for tau in t.saturating_sub(u.min_off as usize - 1)..=t {
                    e.add_expr(&mp.shutdown(case, i, tau), 1.0);
                }
                e.add(c.commit, 1.0);
                e.push(&mut mp.lp, format!("minoff_{id}_{h}"), Sense::Le, 1.0);
            }

            if let Some(rs) = c.spinning {
                let mut e = p_now.clone();
                e.add(rs, 1.0).add(c.commit, -u.p_max);
                e.push(&mut mp.lp, format!("rs_{id}_{h}"), Sense::Le, 0.0);
            }
        }
    }

    for t in 0..nt {
        let h = t + 1;
        let mut bal = Expr::default();
        let mut op = Expr::default();
        let mut spin = Expr::default();
        for i in 0..ng {
            let p = mp.dispatch(case, i, t);
            bal.add_expr(&p, 1.0);
            op.add(mp.cols[i][t].commit, case.units[i].p_max)
                .add_expr(&p, -1.0);
            if let Some(rs) = mp.cols[i][t].spinning {
                spin.add(rs, 1.0);
            }
        }
        bal.push(
            &mut mp.lp,
            format!("balance_{h}"),
            Sense::Eq,
            case.net_load(t),
        );
        if case.reserves.operating[t] > 0.0 {
            op.push(
                &mut mp.lp,
                format!("oper_{h}"),
                Sense::Ge,
                case.reserves.operating[t],
            );
        }
        if case.reserves.spinning[t] > 0.0 {
            spin.push(
                &mut mp.lp,
                format!("spin_{h}"),
                Sense::Ge,
                case.reserves.spinning[t],
            );
        }
    }

    for (k, cut) in cuts.iter().enumerate() {
        mp.add_cut(
            case,
            cut,
            format!("cut{}_{}_h{}", k + 1, cut.kind.label(), cut.hour + 1),
        );
    }
    Ok(mp)
}

/// Solves the master and extracts the schedule along with the MILP objective.
pub fn solve_master(
    case: &SystemCase,
    mp: &MasterProblem,
) -> Result<(Schedule, Solution), ScucError> {
    let sol = solve_milp(&mp.lp, &MilpOptions::default())?;
    match sol.status {
        Status::Optimal => Ok((mp.schedule(case, &sol), sol)),
        s => Err(ScucError::Master(s)),
    }
}
