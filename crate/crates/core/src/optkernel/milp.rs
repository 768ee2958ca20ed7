//! Depth-first branch and bound over binary variables.
//!
//! One tableau is shared by the whole tree: each node only changes binary
//! bounds, which preserves dual feasibility, so the dual simplex resumes from
//! the previous node's basis.

use super::problem::{LinearProgram, Solution, Status};
use super::simplex::{Outcome, Tableau};
use super::{KernelError, INTEGRALITY_TOL};

#[derive(Clone, Copy, Debug)]
pub struct MilpOptions {
    /// Relative optimality gap at which nodes are pruned.
    pub gap_tol: f64,
    pub node_limit: usize,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            node_limit: 1_000_000,
        }
    }
}

struct Node {
    fixings: Vec<(usize, f64)>,
    /// LP bound of the parent.
    bound: f64,
}

/// Solves `lp` with its integer-marked variables restricted to {0, 1}.
///
/// Branching picks the most fractional binary (lowest index on ties) and
/// explores the down branch first, so results are deterministic.
pub fn solve_milp(lp: &LinearProgram, opts: &MilpOptions) -> Result<Solution, KernelError> {
    lp.validate()?;
    let ints: Vec<usize> = (0..lp.num_vars()).filter(|&j| lp.integer[j]).collect();
    let mut tab = Tableau::new(lp);

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut stack = vec![Node {
        fixings: Vec::new(),
        bound: f64::NEG_INFINITY,
    }];
    let mut root_unbounded = false;

    while let Some(node) = stack.pop() {
        let cutoff = match &incumbent {
            Some((obj, _)) => obj - opts.gap_tol * obj.abs().max(1.0),
            None => f64::INFINITY,
        };
        if node.bound >= cutoff {
            continue;
        }
        if nodes >= opts.node_limit {
            stack.push(node);
            break;
        }
        nodes += 1;

        for &j in &ints {
            tab.set_bounds(j, lp.lower[j], lp.upper[j]);
        }
        for &(j, v) in &node.fixings {
            tab.set_bounds(j, v, v);
        }

        match tab.dual_simplex(cutoff) {
            Outcome::Optimal => {}
            Outcome::Infeasible | Outcome::Cutoff => continue,
            Outcome::IterationLimit => {
                return Ok(Solution::without_point(
                    Status::IterationLimit,
                    tab.iterations,
                    nodes,
                ));
            }
        }
        if tab.hits_artificial_bound() {
            if nodes == 1 {
                root_unbounded = true;
                break;
            }
            continue;
        }
        let obj = tab.objective();
        if obj >= cutoff {
            continue;
        }

        let x = &tab.x;
        let mut branch: Option<(usize, f64)> = None;
        for &j in &ints {
            let frac = x[j] - x[j].floor();
            let dist = frac.min(1.0 - frac);
            if dist > INTEGRALITY_TOL && branch.is_none_or(|(_, bd)| dist > bd) {
                branch = Some((j, dist));
            }
        }
        match branch {
            None => {
                let mut point = tab.structural_values();
                for &j in &ints {
                    point[j] = point[j].round();
                }
                incumbent = Some((obj, point));
            }
            Some((j, _)) => {
                if incumbent.is_none() {
                    incumbent = round_up(&tab, &ints);
                }
                let cutoff = match &incumbent {
                    Some((inc, _)) => inc - opts.gap_tol * inc.abs().max(1.0),
                    None => f64::INFINITY,
                };
                let mut fixings = node.fixings;
                // reduced-cost fixing: moving a nonbasic binary off its bound
                // raises the bound by at least |d_j|
                if cutoff.is_finite() {
                    let room = cutoff - obj;
                    for &k in &ints {
                        if tab.lower[k] == tab.upper[k] {
                            continue;
                        }
                        match tab.nonbasic_reduced_cost(k) {
                            Some((d, false)) if d > room => fixings.push((k, 0.0)),
                            Some((d, true)) if -d > room => fixings.push((k, 1.0)),
                            _ => {}
                        }
                    }
                }
                let mut up = fixings.clone();
                up.push((j, 1.0));
                let mut down = fixings;
                down.push((j, 0.0));
                stack.push(Node {
                    fixings: up,
                    bound: obj,
                });
                stack.push(Node {
                    fixings: down,
                    bound: obj,
                });
            }
        }
    }

    if root_unbounded {
        return Ok(Solution::without_point(
            Status::Unbounded,
            tab.iterations,
            nodes,
        ));
    }
    // open nodes left behind carry no bound of their own
    let exhausted = !stack.is_empty();
    Ok(match incumbent {
        Some((obj, primal)) => {
            let status = if exhausted {
                Status::NodeLimit
            } else {
                Status::Optimal
            };
            let bound = if exhausted {
                f64::NEG_INFINITY
            } else {
                obj + lp.objective_offset
            };
            Solution {
                status,
                objective: lp.evaluate(&primal),
                primal,
                duals: Vec::new(),
                reduced_costs: Vec::new(),
                iterations: tab.iterations,
                nodes,
                bound,
            }
        }
        None if exhausted => Solution::without_point(Status::NodeLimit, tab.iterations, nodes),
        None => Solution::without_point(Status::Infeasible, tab.iterations, nodes),
    })
}

/// Primal heuristic: every fractional binary set to 1, the rest kept at their
/// rounded value, continuous part re-optimized.
fn round_up(tab: &Tableau, ints: &[usize]) -> Option<(f64, Vec<f64>)> {
    let mut trial = tab.clone();
    for &j in ints {
        let v = if tab.x[j] > INTEGRALITY_TOL { 1.0 } else { 0.0 };
        trial.set_bounds(j, v, v);
    }
    if trial.dual_simplex(f64::INFINITY) != Outcome::Optimal || trial.hits_artificial_bound() {
        return None;
    }
    let mut point = trial.structural_values();
    for &j in ints {
        point[j] = point[j].round();
    }
    Some((trial.objective(), point))
}
