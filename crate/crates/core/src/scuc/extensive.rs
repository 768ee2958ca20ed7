use super::master::Expr;
use super::{build_master, MasterProblem, ScucError};
use crate::model::{NetworkModel, SystemCase};
use crate::optkernel::Sense;

/// Monolithic MILP: the master plus forecast line limits and, for every
/// scenario and hour, a corrective dispatch satisfying balance, ramp bands,
/// generation limits and line limits without slack.
pub fn build_extensive(
    case: &SystemCase,
    net: &NetworkModel,
    scenarios: &[Vec<f64>],
) -> Result<MasterProblem, ScucError> {
    let mut mp = build_master(case, &[])?;
    let (ng, nt) = (case.num_units(), case.num_hours());
    let flow_rows =
        |mp: &mut MasterProblem, exprs: &[Expr], load: &[f64], wind: &[f64], tag: &str| {
            let fixed = net.fixed_flows(load, wind);
            for l in 0..net.num_lines() {
                let sf = net.unit_factors(l);
                let mut e = Expr::default();
                for i in 0..ng {
                    e.add_expr(&exprs[i], sf[i]);
                }
                let lim = net.flow_limits[l];
                e.clone().push(
                    &mut mp.lp,
                    format!("{tag}_up_{l}"),
                    Sense::Le,
                    lim - fixed[l],
                );
                e.push(
                    &mut mp.lp,
                    format!("{tag}_dn_{l}"),
                    Sense::Ge,
                    -lim - fixed[l],
                );
            }
        };
    for t in 0..nt {
        let fc = case.forecast(t);
        let base: Vec<Expr> = (0..ng).map(|i| mp.dispatch(case, i, t)).collect();
        flow_rows(
            &mut mp,
            &base,
            &fc.load,
            &fc.wind,
            &format!("net_h{}", t + 1),
        );
        for (s, dev) in scenarios.iter().enumerate() {
            let real = case.realize(dev, t);
            let tag = format!("sc{}_h{}", s + 1, t + 1);
            let mut ps = Vec::with_capacity(ng);
            let mut bal = Expr::default();
            for (i, u) in case.units.iter().enumerate() {
                let j = mp
                    .lp
                    .add_var(format!("p_{tag}_{}", u.id), 0.0, 0.0, u.p_max);
                let commit = mp.commit(case, i, t);
                let mut up = Expr::default();
                up.add(j, 1.0)
                    .add_expr(&base[i], -1.0)
                    .add_expr(&commit, -u.corrective_up());
                up.push(&mut mp.lp, format!("{tag}_rup_{}", u.id), Sense::Le, 0.0);
                let mut dn = Expr::default();
                dn.add_expr(&base[i], 1.0)
                    .add(j, -1.0)
                    .add_expr(&commit, -u.corrective_dn());
                dn.push(&mut mp.lp, format!("{tag}_rdn_{}", u.id), Sense::Le, 0.0);
                let mut hi = Expr::default();
                hi.add(j, 1.0).add_expr(&commit, -u.p_max);
                hi.push(&mut mp.lp, format!("{tag}_pmax_{}", u.id), Sense::Le, 0.0);
                let mut lo = Expr::default();
                lo.add(j, 1.0).add_expr(&commit, -u.p_min);
                lo.push(&mut mp.lp, format!("{tag}_pmin_{}", u.id), Sense::Ge, 0.0);
                bal.add(j, 1.0);
                let mut e = Expr::default();
                e.add(j, 1.0);
                ps.push(e);
            }
            let demand = real.load.iter().sum::<f64>() - real.wind.iter().sum::<f64>();
            bal.push(&mut mp.lp, format!("{tag}_balance"), Sense::Eq, demand);
            flow_rows(&mut mp, &ps, &real.load, &real.wind, &tag);
        }
    }
    Ok(mp)
}
