//! Dense bounded-variable dual simplex on an explicit tableau.
//!
//! Every row `a_i x (<=,=,>=) b_i` gets a slack `s_i` with `a_i x + s_i = b_i`
//! and bounds `[0, inf)`, `[0, 0]` or `(-inf, 0]`. The slack basis is the
//! starting point; structurals sit at whichever finite bound keeps their
//! reduced cost dual feasible. Variables lacking that bound get an artificial
//! box at `BIG`, which doubles as the unboundedness detector.
//!
//! Bound changes keep a dual feasible basis dual feasible, so the same tableau
//! is re-optimized in place across branch-and-bound nodes.

use super::problem::{LinearProgram, Sense};
use super::{BLAND_STALL_FACTOR, FEASIBILITY_TOL, PIVOT_TOL};

pub(crate) const BIG: f64 = 1e7;
const DUAL_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic(usize),
    Lower,
    Upper,
    /// Nonbasic free variable held at zero.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    /// Dual objective reached the cutoff; node can be pruned.
    Cutoff,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    t: Vec<f64>,
    d: Vec<f64>,
    cost: Vec<f64>,
    pub(crate) lower: Vec<f64>,
    pub(crate) upper: Vec<f64>,
    artificial: Vec<bool>,
    pub(crate) x: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    nz: Vec<usize>,
    pub(crate) iterations: usize,
    since_refactor: usize,
}

impl Tableau {
    pub(crate) fn new(lp: &LinearProgram) -> Self {
        let m = lp.num_rows();
        let n = lp.num_vars();
        let total = n + m;
        let width = total + 1;
        let mut cost = lp.objective.clone();
        cost.resize(total, 0.0);
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        for row in &lp.constraints {
            let (l, u) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Eq => (0.0, 0.0),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
            };
            lower.push(l);
            upper.push(u);
        }
        let rows: Vec<Vec<(usize, f64)>> = lp
            .constraints
            .iter()
            .map(|r| {
                let mut terms: Vec<(usize, f64)> = Vec::with_capacity(r.terms.len());
                for &(j, a) in &r.terms {
                    if let Some(e) = terms.iter_mut().find(|e| e.0 == j) {
                        e.1 += a;
                    } else {
                        terms.push((j, a));
                    }
                }
                terms
            })
            .collect();
        let rhs: Vec<f64> = lp.constraints.iter().map(|r| r.rhs).collect();

        let mut tab = Self {
            m,
            n,
            width,
            t: vec![0.0; m * width],
            d: cost.clone(),
            cost,
            lower,
            upper,
            artificial: vec![false; total],
            x: vec![0.0; total],
            basis: (n..total).collect(),
            state: vec![VarState::Lower; total],
            rows,
            rhs,
            scratch: vec![0.0; width],
            nz: Vec::with_capacity(width),
            iterations: 0,
            since_refactor: 0,
        };
        tab.load_original();
        for i in 0..m {
            tab.state[n + i] = VarState::Basic(i);
        }
        for j in 0..n {
            let c = tab.cost[j];
            let (l, u) = (tab.lower[j], tab.upper[j]);
            let state = if c > 0.0 {
                if l.is_finite() {
                    VarState::Lower
                } else {
                    tab.lower[j] = -BIG;
                    tab.artificial[j] = true;
                    VarState::Lower
                }
            } else if c < 0.0 {
                if u.is_finite() {
                    VarState::Upper
                } else {
                    tab.upper[j] = BIG;
                    tab.artificial[j] = true;
                    VarState::Upper
                }
            } else if l.is_finite() {
                VarState::Lower
            } else if u.is_finite() {
                VarState::Upper
            } else {
                VarState::Zero
            };
            tab.state[j] = state;
            tab.x[j] = tab.nonbasic_value(j);
        }
        tab.recompute_basics();
        tab
    }

    fn load_original(&mut self) {
        let w = self.width;
        self.t.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.m {
            let row = &mut self.t[i * w..(i + 1) * w];
            for &(j, a) in &self.rows[i] {
                row[j] = a;
            }
            row[self.n + i] = 1.0;
            row[w - 1] = self.rhs[i];
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Lower => self.lower[j],
            VarState::Upper => self.upper[j],
            VarState::Zero => 0.0,
            VarState::Basic(_) => self.x[j],
        }
    }

    pub(crate) fn recompute_basics(&mut self) {
        let w = self.width;
        let active: Vec<(usize, f64)> = (0..self.n + self.m)
            .filter(|&j| !matches!(self.state[j], VarState::Basic(_)) && self.x[j] != 0.0)
            .map(|j| (j, self.x[j]))
            .collect();
        for r in 0..self.m {
            let row = &self.t[r * w..(r + 1) * w];
            let mut v = row[w - 1];
            for &(j, xj) in &active {
                v -= row[j] * xj;
            }
            self.x[self.basis[r]] = v;
        }
    }

    /// Dual objective of the current (dual feasible) basis.
    pub(crate) fn objective(&self) -> f64 {
        self.cost
            .iter()
            .zip(&self.x)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, x)| c * x)
            .sum()
    }

    /// Changes the bounds of a structural variable. Nonbasic variables are
    /// moved to the bound matching the sign of their reduced cost so the
    /// basis stays dual feasible; basic values are updated incrementally.
    pub(crate) fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        if self.lower[j] == lower && self.upper[j] == upper {
            return;
        }
        self.lower[j] = lower;
        self.upper[j] = upper;
        if matches!(self.state[j], VarState::Basic(_)) {
            return;
        }
        let new_state = if self.d[j] > 0.0 && lower.is_finite() {
            VarState::Lower
        } else if self.d[j] < 0.0 && upper.is_finite() {
            VarState::Upper
        } else if lower.is_finite() {
            VarState::Lower
        } else if upper.is_finite() {
            VarState::Upper
        } else {
            VarState::Zero
        };
        self.state[j] = new_state;
        let target = self.nonbasic_value(j);
        let delta = target - self.x[j];
        if delta != 0.0 {
            let w = self.width;
            for r in 0..self.m {
                let a = self.t[r * w + j];
                if a != 0.0 {
                    self.x[self.basis[r]] -= a * delta;
                }
            }
            self.x[j] = target;
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let piv = self.t[r * w + q];
        self.nz.clear();
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    } else {
                        self.nz.push(j);
                    }
                }
            }
            row[q] = 1.0;
            self.scratch.copy_from_slice(row);
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            let f = row[q];
            if f == 0.0 {
                continue;
            }
            for &j in &self.nz {
                let v = row[j] - f * self.scratch[j];
                row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            row[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for &j in &self.nz {
                if j < w - 1 {
                    self.d[j] -= f * self.scratch[j];
                }
            }
        }
        self.d[q] = 0.0;
        let p = self.basis[r];
        self.basis[r] = q;
        self.state[q] = VarState::Basic(r);
        // caller assigns the leaving variable's nonbasic state
        self.state[p] = VarState::Lower;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    fn infeasibility(&self, p: usize) -> f64 {
        let v = self.x[p];
        let tol = FEASIBILITY_TOL * (1.0f64).max(v.abs() * 1e-9);
        if v < self.lower[p] - tol {
            self.lower[p] - v
        } else if v > self.upper[p] + tol {
            v - self.upper[p]
        } else {
            0.0
        }
    }

    fn select_leaving(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.m {
            let p = self.basis[r];
            let inf = self.infeasibility(p);
            if inf <= 0.0 {
                continue;
            }
            match best {
                None => best = Some((r, inf)),
                Some((br, bi)) => {
                    let better = if bland { p < self.basis[br] } else { inf > bi };
                    if better {
                        best = Some((r, inf));
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Ratio test on row `r`. `increase` says whether the leaving variable
    /// must move up to its lower bound.
    fn select_entering(&self, r: usize, increase: bool, bland: bool) -> Option<usize> {
        let w = self.width;
        let row = &self.t[r * w..(r + 1) * w];
        let total = self.n + self.m;
        // direction of x_j that is allowed and moves x_p the right way
        let eligible = |j: usize| -> Option<(f64, f64)> {
            let a = row[j];
            if a.abs() < PIVOT_TOL {
                return None;
            }
            let s = if increase { -a } else { a };
            let ok = match self.state[j] {
                VarState::Basic(_) => false,
                VarState::Lower => s > 0.0 && self.lower[j] < self.upper[j],
                VarState::Upper => s < 0.0 && self.lower[j] < self.upper[j],
                VarState::Zero => true,
            };
            if !ok {
                return None;
            }
            let dj = match self.state[j] {
                VarState::Lower => self.d[j].max(0.0),
                VarState::Upper => (-self.d[j]).max(0.0),
                _ => self.d[j].abs(),
            };
            Some((dj, a.abs()))
        };

        if bland {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..total {
                if let Some((dj, a)) = eligible(j) {
                    let ratio = dj / a;
                    match best {
                        Some((_, br)) if ratio >= br => {}
                        _ => best = Some((j, ratio)),
                    }
                }
            }
            return best.map(|(j, _)| j);
        }

        // Harris two-pass ratio test
        let mut bound = f64::INFINITY;
        for j in 0..total {
            if let Some((dj, a)) = eligible(j) {
                bound = bound.min((dj + DUAL_TOL) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..total {
            if let Some((dj, a)) = eligible(j) {
                if dj / a <= bound {
                    match best {
                        Some((_, ba)) if a <= ba => {}
                        _ => best = Some((j, a)),
                    }
                }
            }
        }
        best.map(|(j, _)| j)
    }

    /// Runs the dual simplex until primal feasibility, infeasibility proof,
    /// or the dual objective exceeding `cutoff`.
    pub(crate) fn dual_simplex(&mut self, cutoff: f64) -> Outcome {
        let total = self.n + self.m;
        let stall_limit = BLAND_STALL_FACTOR * total;
        let max_iter = self.iterations + 200 * total + 10_000;
        let mut best_obj = f64::NEG_INFINITY;
        let mut stall = 0usize;
        let mut bland = false;
        let mut verified = false;
        let refactor_every = (5 * self.m).max(500);

        loop {
            if self.since_refactor >= refactor_every {
                self.refactor();
            }
            let obj = self.objective();
            if obj >= cutoff {
                return Outcome::Cutoff;
            }
            if obj > best_obj + 1e-12 * (1.0 + obj.abs()) {
                best_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > stall_limit {
                    bland = true;
                }
            }
            if self.iterations >= max_iter {
                return Outcome::IterationLimit;
            }
            let Some(r) = self.select_leaving(bland) else {
                // confirm against the original rows before declaring victory
                if !verified && self.residual() > FEASIBILITY_TOL {
                    verified = true;
                    self.refactor();
                    continue;
                }
                return Outcome::Optimal;
            };
            let p = self.basis[r];
            let increase = self.x[p] < self.lower[p];
            let target = if increase {
                self.lower[p]
            } else {
                self.upper[p]
            };
            let Some(q) = self.select_entering(r, increase, bland) else {
                if !verified && self.since_refactor > 0 {
                    verified = true;
                    self.refactor();
                    continue;
                }
                return Outcome::Infeasible;
            };
            let w = self.width;
            let a = self.t[r * w + q];
            let step = (self.x[p] - target) / a;
            for i in 0..self.m {
                let tiq = self.t[i * w + q];
                if tiq != 0.0 {
                    self.x[self.basis[i]] -= tiq * step;
                }
            }
            self.x[q] += step;
            self.pivot(r, q);
            self.x[p] = target;
            self.state[p] = if increase {
                VarState::Lower
            } else {
                VarState::Upper
            };
        }
    }

    /// Largest violation of the original rows by the current point.
    fn residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            let mut act = self.x[self.n + i];
            for &(j, a) in &self.rows[i] {
                act += a * self.x[j];
            }
            let scale = 1.0 + self.rhs[i].abs();
            worst = worst.max((act - self.rhs[i]).abs() / scale);
        }
        worst
    }

    /// Rebuilds the tableau from the original data for the current basis.
    pub(crate) fn refactor(&mut self) {
        let w = self.width;
        let total = self.n + self.m;
        let old_basis = self.basis.clone();
        self.load_original();
        let mut assigned = vec![false; self.m];
        let mut new_basis = vec![usize::MAX; self.m];
        let mut left_out = Vec::new();
        for &var in &old_basis {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if assigned[i] {
                    continue;
                }
                let a = self.t[i * w + var].abs();
                if a > 1e-11 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
            match best {
                Some((i, _)) => {
                    self.pivot_plain(i, var);
                    assigned[i] = true;
                    new_basis[i] = var;
                }
                None => left_out.push(var),
            }
        }
        if !left_out.is_empty() {
            // singular basis: patch the remaining rows with slacks
            for i in 0..self.m {
                if assigned[i] {
                    continue;
                }
                let mut best: Option<(usize, f64)> = None;
                for s in self.n..total {
                    if new_basis.contains(&s) {
                        continue;
                    }
                    let a = self.t[i * w + s].abs();
                    if a > 1e-11 && best.is_none_or(|(_, b)| a > b) {
                        best = Some((s, a));
                    }
                }
                let s = best.map(|(s, _)| s).unwrap_or(self.n + i);
                self.pivot_plain(i, s);
                assigned[i] = true;
                new_basis[i] = s;
            }
            for var in left_out {
                self.state[var] = VarState::Lower;
            }
        }
        self.basis = new_basis;
        for (r, &var) in self.basis.iter().enumerate() {
            self.state[var] = VarState::Basic(r);
        }
        self.d.copy_from_slice(&self.cost);
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * w..(r + 1) * w];
                for j in 0..total {
                    self.d[j] -= cb * row[j];
                }
            }
        }
        for j in 0..total {
            if matches!(self.state[j], VarState::Basic(_)) {
                self.d[j] = 0.0;
                continue;
            }
            // restore sign consistency where both bounds allow it
            if self.d[j] < 0.0 && self.state[j] == VarState::Lower && self.upper[j].is_finite() {
                self.state[j] = VarState::Upper;
            } else if self.d[j] > 0.0
                && self.state[j] == VarState::Upper
                && self.lower[j].is_finite()
            {
                self.state[j] = VarState::Lower;
            }
            if self.state[j] == VarState::Lower && !self.lower[j].is_finite() {
                self.state[j] = if self.upper[j].is_finite() {
                    VarState::Upper
                } else {
                    VarState::Zero
                };
            }
            self.x[j] = self.nonbasic_value(j);
        }
        self.recompute_basics();
        self.since_refactor = 0;
    }

    /// Gauss-Jordan pivot without reduced-cost or state bookkeeping.
    fn pivot_plain(&mut self, r: usize, q: usize) {
        let w = self.width;
        let piv = self.t[r * w + q];
        self.nz.clear();
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    self.nz.push(j);
                }
            }
            row[q] = 1.0;
            self.scratch.copy_from_slice(row);
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            let f = row[q];
            if f == 0.0 {
                continue;
            }
            for &j in &self.nz {
                let v = row[j] - f * self.scratch[j];
                row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            row[q] = 0.0;
        }
    }

    /// True when a variable rests on an artificial box bound.
    pub(crate) fn hits_artificial_bound(&self) -> bool {
        (0..self.n).any(|j| self.artificial[j] && self.x[j].abs() >= 0.5 * BIG)
    }

    /// Row duals in the reporting convention (see `Solution::duals`).
    pub(crate) fn duals(&self, lp: &LinearProgram) -> Vec<f64> {
        lp.constraints
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let y = -self.d[self.n + i];
                match row.sense {
                    Sense::Le => -y,
                    Sense::Eq | Sense::Ge => y,
                }
            })
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect()
    }

    /// Reduced cost of a nonbasic variable and whether it sits at its upper bound.
    pub(crate) fn nonbasic_reduced_cost(&self, j: usize) -> Option<(f64, bool)> {
        match self.state[j] {
            VarState::Lower => Some((self.d[j], false)),
            VarState::Upper => Some((self.d[j], true)),
            _ => None,
        }
    }

    pub(crate) fn reduced_costs(&self) -> Vec<f64> {
        self.d[..self.n].to_vec()
    }

    pub(crate) fn structural_values(&self) -> Vec<f64> {
        self.x[..self.n].to_vec()
    }
}
