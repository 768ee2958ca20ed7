//! Small dense LP/MILP kernel.
//!
//! Hosts every optimization problem in the crate: the master unit-commitment
//! MILP, the hourly network and scenario checks, and the re-dispatch LPs. The
//! problems are at most a few hundred rows, so a dense tableau with explicit
//! duals is adequate and keeps the dual values fully under our control.

pub mod audit;
mod lpfile;
mod milp;
mod problem;
mod simplex;

use thiserror::Error;

pub use lpfile::write_lp;
pub use milp::{solve_milp, MilpOptions};
pub use problem::{
    kkt_residuals, Constraint, KktResiduals, LinearProgram, Sense, Solution, Status,
};

use simplex::{Outcome, Tableau};

pub const PIVOT_TOL: f64 = 1e-9;
pub const FEASIBILITY_TOL: f64 = 1e-7;
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Bland's rule kicks in after this many multiples of (rows + cols)
/// iterations without objective progress.
pub const BLAND_STALL_FACTOR: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {var} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: String, lower: f64, upper: f64 },
    #[error("non-finite data in {0}")]
    NonFinite(String),
}

/// Solves the continuous relaxation of `lp` (integrality marks are ignored).
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution, KernelError> {
    lp.validate()?;
    let mut tab = Tableau::new(lp);
    let outcome = tab.dual_simplex(f64::INFINITY);
    let status = match outcome {
        Outcome::Optimal if tab.hits_artificial_bound() => Status::Unbounded,
        Outcome::Optimal => Status::Optimal,
        Outcome::Infeasible => Status::Infeasible,
        Outcome::IterationLimit | Outcome::Cutoff => Status::IterationLimit,
    };
    if status != Status::Optimal {
        return Ok(Solution::without_point(status, tab.iterations, 1));
    }
    let primal = tab.structural_values();
    let objective = lp.evaluate(&primal);
    let sol = Solution {
        status,
        objective,
        duals: tab.duals(lp),
        reduced_costs: tab.reduced_costs(),
        primal,
        iterations: tab.iterations,
        nodes: 1,
        bound: objective,
    };
    audit::record(lp, &sol);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} != {b}");
    }

    #[test]
    fn single_lower_bound_row() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, 0.0, 10.0);
        lp.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_close(sol.primal[0], 1.0);
        assert_close(sol.objective, 1.0);
        assert_close(sol.duals[0], 1.0);
        assert_close(sol.sensitivity(&lp, 0), 1.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint("lo", vec![(x, 1.0)], Sense::Ge, 5.0);
        lp.add_constraint("hi", vec![(x, 1.0)], Sense::Le, 3.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn le_row_dual_is_nonnegative() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0, 0.0, f64::INFINITY);
        let y = lp.add_var("y", -1.0, 0.0, f64::INFINITY);
        lp.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_close(sol.objective, -1.0);
        assert_close(sol.duals[0], 1.0);
        assert_close(sol.sensitivity(&lp, 0), -1.0);
        assert!(kkt_residuals(&lp, &sol).within_tolerance(sol.objective));
    }

    #[test]
    fn unbounded_direction_is_reported() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0, 0.0, f64::INFINITY);
        lp.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // min |x - 3| via free x and split deviation
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::NEG_INFINITY, f64::INFINITY);
        let p = lp.add_var("p", 1.0, 0.0, f64::INFINITY);
        let q = lp.add_var("q", 1.0, 0.0, f64::INFINITY);
        lp.add_constraint("dev", vec![(x, 1.0), (p, -1.0), (q, 1.0)], Sense::Eq, 3.0);
        lp.add_constraint("cap", vec![(x, 1.0)], Sense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_close(sol.objective, 2.0);
        assert_close(sol.primal[x], 1.0);
        assert!(kkt_residuals(&lp, &sol).within_tolerance(sol.objective));
    }

    #[test]
    fn objective_offset_is_reported() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 2.0, 1.0, 4.0);
        lp.objective_offset = 10.0;
        let sol = solve_lp(&lp).unwrap();
        assert_close(sol.primal[x], 1.0);
        assert_close(sol.objective, 12.0);
    }

    #[test]
    fn knapsack_milp() {
        let mut lp = LinearProgram::new();
        let a = lp.add_binary("x1", -3.0);
        let b = lp.add_binary("x2", -2.0);
        lp.add_constraint("one", vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0);
        let sol = solve_milp(&lp, &MilpOptions::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.primal, vec![1.0, 0.0]);
        assert_close(sol.objective, -3.0);
    }

    #[test]
    fn integral_relaxation_needs_one_node() {
        let mut lp = LinearProgram::new();
        let a = lp.add_binary("a", 1.0);
        let b = lp.add_binary("b", -1.0);
        lp.add_constraint("link", vec![(a, 1.0), (b, 1.0)], Sense::Le, 2.0);
        let sol = solve_milp(&lp, &MilpOptions::default()).unwrap();
        assert_eq!(sol.nodes, 1);
        assert_eq!(sol.primal, vec![0.0, 1.0]);
    }

    #[test]
    fn fractional_relaxation_branches() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut lp = LinearProgram::new();
        let a = lp.add_binary("a", -5.0);
        let b = lp.add_binary("b", -4.0);
        let c = lp.add_binary("c", -3.0);
        lp.add_constraint("r1", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 4.0);
        lp.add_constraint("r2", vec![(a, 4.0), (b, 1.0), (c, 2.0)], Sense::Le, 5.0);
        let sol = solve_milp(&lp, &MilpOptions::default()).unwrap();
        // enumerate
        let mut best = f64::INFINITY;
        for mask in 0..8u32 {
            let v: Vec<f64> = (0..3).map(|k| ((mask >> k) & 1) as f64).collect();
            if 2.0 * v[0] + 3.0 * v[1] + v[2] <= 4.0 && 4.0 * v[0] + v[1] + 2.0 * v[2] <= 5.0 {
                best = best.min(-5.0 * v[0] - 4.0 * v[1] - 3.0 * v[2]);
            }
        }
        assert_close(sol.objective, best);
    }

    #[test]
    fn infeasible_milp() {
        let mut lp = LinearProgram::new();
        let a = lp.add_binary("a", 1.0);
        let b = lp.add_binary("b", 1.0);
        lp.add_constraint("half", vec![(a, 2.0), (b, 2.0)], Sense::Eq, 1.0);
        assert_eq!(
            solve_milp(&lp, &MilpOptions::default()).unwrap().status,
            Status::Infeasible
        );
    }

    #[test]
    fn node_limit_flags_suboptimal() {
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (0..6)
            .map(|k| lp.add_binary(format!("x{k}"), -(k as f64 + 1.0)))
            .collect();
        lp.add_constraint(
            "cap",
            vars.iter().map(|&v| (v, 2.0)).collect(),
            Sense::Le,
            5.0,
        );
        let sol = solve_milp(
            &lp,
            &MilpOptions {
                gap_tol: 1e-6,
                node_limit: 1,
            },
        )
        .unwrap();
        assert_eq!(sol.status, Status::NodeLimit);
    }

    #[test]
    fn rejects_bad_bounds() {
        let mut lp = LinearProgram::new();
        lp.add_var("x", 1.0, 2.0, 1.0);
        assert!(matches!(
            solve_lp(&lp),
            Err(KernelError::InvalidBounds { .. })
        ));
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let mut lp = LinearProgram::new();
        let xs: Vec<usize> = (0..5)
            .map(|k| lp.add_var(format!("x{k}"), 1.0 + k as f64 * 0.37, 0.0, 7.0))
            .collect();
        lp.add_constraint(
            "sum",
            xs.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Ge,
            12.5,
        );
        lp.add_constraint("pair", vec![(xs[0], 1.0), (xs[1], -1.0)], Sense::Le, 0.5);
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a, b);
    }
}
