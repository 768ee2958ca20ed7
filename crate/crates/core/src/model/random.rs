use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    Bus, CostSegment, Distribution, InitialStatus, Line, LoadPoint, Reserves, SystemCase,
    ThermalUnit, WindFarm,
};

/// Size limits for [`random_case`].
#[derive(Clone, Copy, Debug)]
pub struct RandomCaseLimits {
    pub max_buses: usize,
    pub max_units: usize,
    pub max_hours: usize,
}

impl Default for RandomCaseLimits {
    fn default() -> Self {
        RandomCaseLimits {
            max_buses: 3,
            max_units: 2,
            max_hours: 4,
        }
    }
}

/// Small random test system, reproducible from `seed`. Not guaranteed to be
/// feasible: line limits and ramps are drawn so that some instances bind.
pub fn random_case(seed: u64, limits: RandomCaseLimits) -> SystemCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = rng.random_range(1..=limits.max_buses.max(1));
    let ng = rng.random_range(1..=limits.max_units.max(1));
    let nt = rng.random_range(1..=limits.max_hours.max(1));
    let buses: Vec<Bus> = (1..=nb as u32).map(|id| Bus { id }).collect();

    let mut units: Vec<ThermalUnit> = (1..=ng as u32)
        .map(|id| {
            let p_min = rng.random_range(5.0..25.0f64).round();
            let p_max = rng.random_range(60.0..140.0f64).round();
            let ramp = rng.random_range(40.0..150.0f64).round();
            let corrective = rng.random_range(8.0..40.0f64).round();
            let min_on = rng.random_range(1..=3);
            let min_off = rng.random_range(1..=3);
            let on = id == 1 || rng.random_bool(0.5);
            let initial_status = if on {
                InitialStatus {
                    hours: rng.random_range(min_on as i32..=min_on as i32 + 2),
                    output_mw: (p_min + p_max) / 2.0,
                }
            } else {
                InitialStatus {
                    hours: -rng.random_range(min_off as i32..=min_off as i32 + 2),
                    output_mw: 0.0,
                }
            };
            let mc = rng.random_range(10.0..40.0f64).round();
            let mid = ((p_min + p_max) / 2.0).round();
            ThermalUnit {
                id,
                bus: rng.random_range(1..=nb as u32),
                p_min,
                p_max,
                ramp_up: ramp,
                ramp_down: ramp,
                min_on,
                min_off,
                initial_status,
                cost_segments: vec![
                    CostSegment {
                        breakpoint: mid,
                        marginal_cost: mc,
                    },
                    CostSegment {
                        breakpoint: p_max,
                        marginal_cost: mc + rng.random_range(1.0..8.0f64).round(),
                    },
                ],
                no_load_cost: rng.random_range(20.0..200.0f64).round(),
                startup_cost: rng.random_range(0.0..300.0f64).round(),
                shutdown_cost: rng.random_range(0.0..30.0f64).round(),
                corrective_up: Some(corrective),
                corrective_dn: Some(corrective),
            }
        })
        .collect();

    let capacity: f64 = units.iter().map(|u| u.p_max).sum();
    let mut lines = Vec::new();
    if nb >= 2 {
        let mut pairs = vec![(1, 2)];
        if nb == 3 {
            pairs.push((2, 3));
            if rng.random_bool(0.5) {
                pairs.push((1, 3));
            }
        }
        for (k, (f, t)) in pairs.into_iter().enumerate() {
            lines.push(Line {
                id: k as u32 + 1,
                from_bus: f,
                to_bus: t,
                reactance: rng.random_range(0.05..0.3f64),
                flow_limit: (capacity * rng.random_range(0.15..0.5f64)).round(),
            });
        }
    }

    let n_loads = rng.random_range(1..=2);
    let mut loads: Vec<LoadPoint> = (0..n_loads)
        .map(|_| LoadPoint {
            bus: rng.random_range(1..=nb as u32),
            hourly_mean: (0..nt)
                .map(|_| {
                    (capacity * rng.random_range(0.15..0.35f64) / n_loads as f64 * 2.0).round()
                })
                .collect(),
            sigma_fraction: 0.10,
            distribution: Distribution::TruncatedNormal,
            skewness: 0.0,
        })
        .collect();
    let wind: Vec<WindFarm> = if rng.random_bool(0.5) {
        vec![WindFarm {
            bus: rng.random_range(1..=nb as u32),
            hourly_mean: (0..nt)
                .map(|_| rng.random_range(0.0..20.0f64).round())
                .collect(),
            sigma_fraction: 0.20,
            distribution: Distribution::Normal,
            skewness: 0.0,
        }]
    } else {
        vec![]
    };
    // units starting up can only reach p_min in their first hour, so the
    // first hour is sized to what is already on
    let on_cap: f64 = units
        .iter()
        .filter(|u| u.initial_status.is_on())
        .map(|u| u.p_max)
        .sum();
    let total: f64 = loads.iter().map(|l| l.hourly_mean[0]).sum();
    if total > 0.7 * on_cap {
        let f = 0.7 * on_cap / total;
        loads
            .iter_mut()
            .for_each(|l| l.hourly_mean[0] = (l.hourly_mean[0] * f).round());
    }
    let first: f64 = loads.iter().map(|l| l.hourly_mean[0]).sum::<f64>()
        - wind.iter().map(|w| w.hourly_mean[0]).sum::<f64>();
    for u in units.iter_mut().filter(|u| u.initial_status.is_on()) {
        u.initial_status.output_mw = (first * u.p_max / on_cap).clamp(u.p_min, u.p_max).round();
    }
    let reserves = Reserves {
        spinning: (0..nt)
            .map(|t| (0.03 * loads.iter().map(|l| l.hourly_mean[t]).sum::<f64>()).round())
            .collect(),
        operating: (0..nt)
            .map(|t| (0.06 * loads.iter().map(|l| l.hourly_mean[t]).sum::<f64>()).round())
            .collect(),
    };
    SystemCase {
        buses,
        lines,
        units,
        loads,
        wind,
        reserves,
        slack_bus: None,
        horizon: nt,
    }
}
