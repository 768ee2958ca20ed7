//! Problem and solution containers shared by the LP and MILP paths.

use serde::Serialize;

use super::KernelError;

/// Row sense of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    /// Converts a reported dual (non-negative for binding `<=`/`>=` rows under
    /// minimization) into the objective sensitivity d(obj)/d(rhs).
    pub fn sensitivity(self, dual: f64) -> f64 {
        match self {
            Sense::Le => -dual,
            Sense::Eq | Sense::Ge => dual,
        }
    }

    pub(crate) fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// A minimization problem over bounded variables with linear rows.
///
/// Infinite bounds are written as `f64::NEG_INFINITY` / `f64::INFINITY`.
/// Variables marked integer must have bounds within `[0, 1]`; the MILP
/// path branches on them as binaries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
    pub constraints: Vec<Constraint>,
    /// Constant added to every reported objective value.
    pub objective_offset: f64,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, cost: f64, lower: f64, upper: f64) -> usize {
        self.names.push(name.into());
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.integer.push(false);
        self.names.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> usize {
        let j = self.add_var(name, cost, 0.0, 1.0);
        self.integer[j] = true;
        j
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn has_integers(&self) -> bool {
        self.integer.iter().any(|&b| b)
    }

    /// Objective value of `x`, offset included.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .objective
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let n = self.num_vars();
        if self.lower.len() != n
            || self.upper.len() != n
            || self.integer.len() != n
            || self.names.len() != n
        {
            return Err(KernelError::Dimension(format!(
                "variable arrays disagree: {} costs, {} lower, {} upper, {} integer marks",
                n,
                self.lower.len(),
                self.upper.len(),
                self.integer.len()
            )));
        }
        for j in 0..n {
            let (l, u, c) = (self.lower[j], self.upper[j], self.objective[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(KernelError::InvalidBounds {
                    var: self.names[j].clone(),
                    lower: l,
                    upper: u,
                });
            }
            if !c.is_finite() {
                return Err(KernelError::NonFinite(format!(
                    "objective coefficient of {}",
                    self.names[j]
                )));
            }
            if self.integer[j] && (l < 0.0 || u > 1.0) {
                return Err(KernelError::InvalidBounds {
                    var: self.names[j].clone(),
                    lower: l,
                    upper: u,
                });
            }
        }
        for row in &self.constraints {
            if !row.rhs.is_finite() {
                return Err(KernelError::NonFinite(format!(
                    "right-hand side of {}",
                    row.name
                )));
            }
            for &(j, a) in &row.terms {
                if j >= n {
                    return Err(KernelError::Dimension(format!(
                        "row {} references variable {} of {}",
                        row.name, j, n
                    )));
                }
                if !a.is_finite() {
                    return Err(KernelError::NonFinite(format!(
                        "coefficient in row {}",
                        row.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// MILP node budget exhausted; `primal` holds the best incumbent if any.
    NodeLimit,
    /// Simplex iteration cap hit (numerical trouble).
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Objective value including the problem's offset.
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One entry per constraint (LP only). Under minimization, binding `<=`
    /// and `>=` rows carry non-negative duals; equality rows report
    /// d(obj)/d(rhs). Use [`Sense::sensitivity`] to get the derivative.
    pub duals: Vec<f64>,
    /// Reduced costs of the structural variables (LP only).
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// Branch-and-bound nodes explored (1 for a pure LP).
    pub nodes: usize,
    /// Best proven lower bound (MILP); equals `objective` for optimal LPs.
    pub bound: f64,
}

impl Solution {
    pub(crate) fn without_point(status: Status, iterations: usize, nodes: usize) -> Self {
        Self {
            status,
            objective: f64::NAN,
            primal: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            iterations,
            nodes,
            bound: f64::NAN,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// d(obj)/d(rhs) for row `i`.
    pub fn sensitivity(&self, lp: &LinearProgram, i: usize) -> f64 {
        lp.constraints[i].sense.sensitivity(self.duals[i])
    }
}

/// Optimality certificate residuals of an LP solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual_sign: f64,
    pub complementarity: f64,
    /// |primal objective - dual objective| (offset excluded).
    pub gap: f64,
}

impl KktResiduals {
    /// Checks the residuals against the kernel's reporting tolerances.
    pub fn within_tolerance(&self, objective: f64) -> bool {
        self.primal <= 1e-7
            && self.dual_sign <= 1e-6
            && self.complementarity <= 1e-6
            && self.gap <= 1e-6 * (1.0 + objective.abs())
    }
}

/// Recomputes primal feasibility, dual sign, complementary slackness and the
/// duality gap of an optimal LP solution directly from the problem data.
pub fn kkt_residuals(lp: &LinearProgram, sol: &Solution) -> KktResiduals {
    let n = lp.num_vars();
    let x = &sol.primal;
    let mut res = KktResiduals::default();
    let mut reduced: Vec<f64> = lp.objective.clone();
    let mut dual_obj = 0.0;

    for (i, row) in lp.constraints.iter().enumerate() {
        let act = row.activity(x);
        let slack = row.rhs - act;
        let viol = match row.sense {
            Sense::Le => (-slack).max(0.0),
            Sense::Ge => slack.max(0.0),
            Sense::Eq => slack.abs(),
        };
        res.primal = res.primal.max(viol);
        let y = row.sense.sensitivity(sol.duals[i]);
        let sign_viol = match row.sense {
            Sense::Le => y.max(0.0),
            Sense::Ge => (-y).max(0.0),
            Sense::Eq => 0.0,
        };
        res.dual_sign = res.dual_sign.max(sign_viol);
        if row.sense != Sense::Eq {
            res.complementarity = res.complementarity.max((y * slack).abs());
        }
        dual_obj += y * row.rhs;
        for &(j, a) in &row.terms {
            reduced[j] -= y * a;
        }
    }

    for j in 0..n {
        let (l, u, r) = (lp.lower[j], lp.upper[j], reduced[j]);
        res.primal = res.primal.max((l - x[j]).max(0.0)).max((x[j] - u).max(0.0));
        if r > 0.0 {
            if l.is_finite() {
                dual_obj += r * l;
                res.complementarity = res.complementarity.max(r * (x[j] - l).abs());
            } else {
                res.dual_sign = res.dual_sign.max(r);
            }
        } else if r < 0.0 {
            if u.is_finite() {
                dual_obj += r * u;
                res.complementarity = res.complementarity.max(-r * (u - x[j]).abs());
            } else {
                res.dual_sign = res.dual_sign.max(-r);
            }
        }
    }
    let primal_obj = sol.objective - lp.objective_offset;
    res.gap = (primal_obj - dual_obj).abs();
    res
}
