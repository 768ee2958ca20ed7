//! DC network sensitivities.

use std::collections::VecDeque;

use super::{ModelError, SystemCase};

/// Shift factors and bus incidence of units, loads and wind farms.
///
/// `shift_factors[l][b]` is the MW flow on line `l` (positive from `from_bus`
/// to `to_bus`) caused by injecting 1 MW at bus `b` and withdrawing it at the
/// slack bus. Incidence rows hold a single 1 at the element's bus.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkModel {
    pub shift_factors: Vec<Vec<f64>>,
    pub slack: usize,
    pub unit_incidence: Vec<Vec<f64>>,
    pub load_incidence: Vec<Vec<f64>>,
    pub wind_incidence: Vec<Vec<f64>>,
    pub unit_bus: Vec<usize>,
    pub load_bus: Vec<usize>,
    pub wind_bus: Vec<usize>,
    pub flow_limits: Vec<f64>,
    pub bus_count: usize,
}

impl NetworkModel {
    pub fn num_lines(&self) -> usize {
        self.shift_factors.len()
    }

    pub fn num_buses(&self) -> usize {
        self.bus_count
    }

    /// Line flows for a bus injection vector (MW).
    pub fn flows(&self, injection: &[f64]) -> Vec<f64> {
        self.shift_factors
            .iter()
            .map(|row| row.iter().zip(injection).map(|(s, p)| s * p).sum())
            .collect()
    }

    /// Sensitivity of line `l` to each unit's output (SF * K_P).
    pub fn unit_factors(&self, l: usize) -> Vec<f64> {
        self.unit_bus
            .iter()
            .map(|&b| self.shift_factors[l][b])
            .collect()
    }

    /// Bus injections from unit outputs, loads and wind.
    pub fn injection(&self, units: &[f64], loads: &[f64], wind: &[f64]) -> Vec<f64> {
        let mut inj = vec![0.0; self.bus_count];
        for (p, &b) in units.iter().zip(&self.unit_bus) {
            inj[b] += p;
        }
        for (d, &b) in loads.iter().zip(&self.load_bus) {
            inj[b] -= d;
        }
        for (w, &b) in wind.iter().zip(&self.wind_bus) {
            inj[b] += w;
        }
        inj
    }

    /// Flows caused by loads and wind alone (units at zero).
    pub fn fixed_flows(&self, loads: &[f64], wind: &[f64]) -> Vec<f64> {
        let units = vec![0.0; self.unit_bus.len()];
        self.flows(&self.injection(&units, loads, wind))
    }
}

pub(super) fn check_connected(case: &SystemCase) -> Result<(), ModelError> {
    let nb = case.buses.len();
    let mut adj = vec![Vec::new(); nb];
    for l in &case.lines {
        let (Some(f), Some(t)) = (case.bus_index(l.from_bus), case.bus_index(l.to_bus)) else {
            continue;
        };
        adj[f].push(t);
        adj[t].push(f);
    }
    let Some(slack) = case.bus_index(case.slack()) else {
        return Err(ModelError::Disconnected {
            component: case.buses.iter().map(|b| b.id).collect(),
        });
    };
    let mut seen = vec![false; nb];
    seen[slack] = true;
    let mut queue = VecDeque::from([slack]);
    while let Some(b) = queue.pop_front() {
        for &n in &adj[b] {
            if !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    let mut component: Vec<u32> = (0..nb)
        .filter(|&b| !seen[b])
        .map(|b| case.buses[b].id)
        .collect();
    if component.is_empty() {
        Ok(())
    } else {
        component.sort_unstable();
        Err(ModelError::Disconnected { component })
    }
}

/// Solves `a x = b` for every column of `b` by Gaussian elimination with
/// partial pivoting. `a` is n x n row-major.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in 0..n {
            if i == col || a[i][col] == 0.0 {
                continue;
            }
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            for k in 0..b[i].len() {
                b[i][k] -= f * b[col][k];
            }
        }
    }
    for i in 0..n {
        let d = a[i][i];
        b[i].iter_mut().for_each(|v| *v /= d);
    }
    Some(b)
}

/// Builds shift factors from the reduced nodal susceptance matrix.
pub fn compute_shift_factors(case: &SystemCase) -> Result<NetworkModel, ModelError> {
    check_connected(case)?;
    let nb = case.buses.len();
    let slack = case.bus_index(case.slack()).ok_or(ModelError::Singular)?;
    let idx = |id: u32| case.bus_index(id).expect("validated bus reference");

    let mut bbus = vec![vec![0.0; nb]; nb];
    for l in &case.lines {
        let (f, t) = (idx(l.from_bus), idx(l.to_bus));
        let y = 1.0 / l.reactance;
        bbus[f][f] += y;
        bbus[t][t] += y;
        bbus[f][t] -= y;
        bbus[t][f] -= y;
    }
    let keep: Vec<usize> = (0..nb).filter(|&b| b != slack).collect();
    let reduced: Vec<Vec<f64>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| bbus[i][j]).collect())
        .collect();
    let identity: Vec<Vec<f64>> = (0..keep.len())
        .map(|i| {
            (0..keep.len())
                .map(|j| if i == j { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    // columns of the inverse = angle responses to unit injections
    let inverse = solve_dense(reduced, identity).ok_or(ModelError::Singular)?;
    let mut angle = vec![vec![0.0; nb]; nb]; // angle[bus][injection bus]
    for (ri, &i) in keep.iter().enumerate() {
        for (rj, &j) in keep.iter().enumerate() {
            angle[i][j] = inverse[ri][rj];
        }
    }

    let shift_factors: Vec<Vec<f64>> = case
        .lines
        .iter()
        .map(|l| {
            let (f, t) = (idx(l.from_bus), idx(l.to_bus));
            (0..nb)
                .map(|b| (angle[f][b] - angle[t][b]) / l.reactance)
                .collect()
        })
        .collect();

    let incidence = |buses: &[usize]| -> Vec<Vec<f64>> {
        buses
            .iter()
            .map(|&b| (0..nb).map(|k| if k == b { 1.0 } else { 0.0 }).collect())
            .collect()
    };
    let unit_bus: Vec<usize> = case.units.iter().map(|u| idx(u.bus)).collect();
    let load_bus: Vec<usize> = case.loads.iter().map(|l| idx(l.bus)).collect();
    let wind_bus: Vec<usize> = case.wind.iter().map(|w| idx(w.bus)).collect();
    Ok(NetworkModel {
        shift_factors,
        slack,
        unit_incidence: incidence(&unit_bus),
        load_incidence: incidence(&load_bus),
        wind_incidence: incidence(&wind_bus),
        unit_bus,
        load_bus,
        wind_bus,
        flow_limits: case.lines.iter().map(|l| l.flow_limit).collect(),
        bus_count: nb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bus, Line, Reserves};

    fn bare_case(buses: &[u32], lines: &[(u32, u32, f64)], slack: u32) -> SystemCase {
        SystemCase {
            buses: buses.iter().map(|&id| Bus { id }).collect(),
            lines: lines
                .iter()
                .enumerate()
                .map(|(k, &(f, t, x))| Line {
                    id: k as u32 + 1,
                    from_bus: f,
                    to_bus: t,
                    reactance: x,
                    flow_limit: 100.0,
                })
                .collect(),
            units: vec![],
            loads: vec![],
            wind: vec![],
            reserves: Reserves {
                spinning: vec![0.0],
                operating: vec![0.0],
            },
            slack_bus: Some(slack),
            horizon: 1,
        }
    }

    #[test]
    fn two_bus_injection_flows_toward_slack() {
        let case = bare_case(&[1, 2], &[(1, 2, 0.1)], 1);
        let net = compute_shift_factors(&case).unwrap();
        assert!((net.shift_factors[0][1] + 1.0).abs() < 1e-12);
        assert_eq!(net.shift_factors[0][0], 0.0);
    }

    #[test]
    fn triangle_splits_by_path_reactance() {
        // hand solve: B_red = [[2,-1],[-1,2]]/x; injecting at bus 2 gives
        // angles (2/3, 1/3)x, so 2/3 returns on the direct line
        let case = bare_case(&[1, 2, 3], &[(1, 2, 0.2), (1, 3, 0.2), (2, 3, 0.2)], 1);
        let net = compute_shift_factors(&case).unwrap();
        assert!((net.shift_factors[0][1] + 2.0 / 3.0).abs() < 1e-12);
        assert!((net.shift_factors[1][1] + 1.0 / 3.0).abs() < 1e-12);
        assert!((net.shift_factors[2][1] - 1.0 / 3.0).abs() < 1e-12);
        for row in &net.shift_factors {
            assert_eq!(row[0], 0.0);
        }
    }

    #[test]
    fn disconnected_component_is_named() {
        let case = bare_case(&[1, 2, 3, 4], &[(1, 2, 0.1), (3, 4, 0.1)], 1);
        match compute_shift_factors(&case) {
            Err(ModelError::Disconnected { component }) => assert_eq!(component, vec![3, 4]),
            other => panic!("expected disconnection, got {other:?}"),
        }
    }
}
