use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Provenance, ScenarioSet, StochasticError};

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_target(set: &ScenarioSet, target: usize) -> Result<(), StochasticError> {
    if set.is_empty() {
        return Err(StochasticError::Empty);
    }
    if target == 0 {
        return Err(StochasticError::ZeroTarget);
    }
    if target > set.len() {
        return Err(StochasticError::TargetTooLarge {
            target,
            size: set.len(),
        });
    }
    Ok(())
}

/// Probability-weighted distance of every scenario to its nearest selected one.
pub fn kantorovich_distance(set: &ScenarioSet, selected: &[usize]) -> f64 {
    let d = set.deviates.iter().zip(&set.probabilities).map(|(x, p)| {
        p * selected
            .iter()
            .map(|&s| dist(x, &set.deviates[s]))
            .fold(f64::INFINITY, f64::min)
    });
    compensated_sum(d)
}

struct Selector<'a> {
    set: &'a ScenarioSet,
    /// Distance to the selected set.
    near: Vec<f64>,
    nearest: Vec<usize>,
    selected: Vec<bool>,
    order: Vec<usize>,
}

impl<'a> Selector<'a> {
    fn new(set: &'a ScenarioSet) -> Self {
        let n = set.len();
        Selector {
            set,
            near: vec![f64::INFINITY; n],
            nearest: vec![usize::MAX; n],
            selected: vec![false; n],
            order: vec![],
        }
    }

    /// Objective decrease from adding `u` (for the first pick: minus the
    /// resulting objective).
    fn gain(&self, u: usize) -> f64 {
        let xu = &self.set.deviates[u];
        let mut g = 0.0;
        for k in 0..self.set.len() {
            if self.selected[k] {
                continue;
            }
            let d = dist(&self.set.deviates[k], xu);
            g += if self.order.is_empty() {
                -self.set.probabilities[k] * d
            } else {
                self.set.probabilities[k] * (self.near[k] - d).max(0.0)
            };
        }
        g
    }

    fn select(&mut self, u: usize) {
        self.selected[u] = true;
        self.order.push(u);
        let xu = &self.set.deviates[u];
        for k in 0..self.set.len() {
            let d = if k == u {
                0.0
            } else {
                dist(&self.set.deviates[k], xu)
            };
            if d < self.near[k] {
                self.near[k] = d;
                self.nearest[k] = u;
            }
        }
    }

    fn finish(self) -> ScenarioSet {
        let mut order = self.order;
        order.sort_unstable();
        let slot: Vec<Option<usize>> = {
            let mut s = vec![None; self.set.len()];
            for (i, &k) in order.iter().enumerate() {
                s[k] = Some(i);
            }
            s
        };
        let mut buckets: Vec<Vec<f64>> = vec![vec![]; order.len()];
        for (k, &p) in self.set.probabilities.iter().enumerate() {
            let owner =
                slot[k].unwrap_or_else(|| slot[self.nearest[k]].expect("nearest is selected"));
            buckets[owner].push(p);
        }
        ScenarioSet {
            deviates: order
                .iter()
                .map(|&k| self.set.deviates[k].clone())
                .collect(),
            probabilities: buckets.into_iter().map(compensated_sum).collect(),
            seed: self.set.seed,
            provenance: Provenance::Reduced,
        }
    }
}

#[derive(PartialEq)]
struct Candidate {
    gain: f64,
    index: usize,
    round: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fast-forward selection of `target` scenarios. Gains only shrink as the
/// selected set grows, so stale gains are valid upper bounds and only the
/// heap top needs re-evaluation (lazy greedy). Picks the same scenarios as
/// [`reduce_plain`]; ties go to the lowest index.
pub fn reduce(set: &ScenarioSet, target: usize) -> Result<ScenarioSet, StochasticError> {
    check_target(set, target)?;
    let n = set.len();
    let mut sel = Selector::new(set);
    let first = (0..n)
        .map(|u| (sel.gain(u), u))
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
        .unwrap()
        .1;
    sel.select(first);
    let mut heap: BinaryHeap<Candidate> = (0..n)
        .filter(|&u| u != first)
        .map(|u| Candidate {
            gain: sel.gain(u),
            index: u,
            round: 1,
        })
        .collect();
    while sel.order.len() < target {
        let round = sel.order.len();
        let mut top = heap.pop().expect("candidates remain");
        while top.round != round {
            top = Candidate {
                gain: sel.gain(top.index),
                index: top.index,
                round,
            };
            heap.push(top);
            top = heap.pop().unwrap();
        }
        sel.select(top.index);
    }
    Ok(sel.finish())
}

/// Textbook forward selection, recomputing every gain each round.
pub fn reduce_plain(set: &ScenarioSet, target: usize) -> Result<ScenarioSet, StochasticError> {
    check_target(set, target)?;
    let mut sel = Selector::new(set);
    while sel.order.len() < target {
        let best = (0..set.len())
            .filter(|&u| !sel.selected[u])
            .map(|u| (sel.gain(u), u))
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .unwrap()
            .1;
        sel.select(best);
    }
    Ok(sel.finish())
}
