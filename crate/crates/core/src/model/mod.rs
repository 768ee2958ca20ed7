//! System data model: buses, lines, thermal units, uncertain loads and wind,
//! reserve requirements. Cases are immutable once validated and can be shared
//! read-only across concurrent subproblem evaluations.

mod fixtures;
mod io;
mod network;
mod random;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fixtures::{bundled_case, bundled_case_json, BUNDLED_CASES};
pub use io::{load_case, parse_case, save_case, to_json};
pub use network::{compute_shift_factors, NetworkModel};
pub use random::{random_case, RandomCaseLimits};
pub use validate::ValidationReport;

/// Fraction of the hourly ramp rate deliverable within the ten-minute
/// corrective window.
pub const CORRECTIVE_FRACTION: f64 = 10.0 / 60.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("invalid case:\n{0}")]
    Validation(ValidationReport),
    #[error("network is disconnected: buses {component:?} cannot reach the slack bus")]
    Disconnected { component: Vec<u32> },
    #[error("reduced susceptance matrix is singular")]
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    /// Per-unit series reactance.
    pub reactance: f64,
    /// MW.
    pub flow_limit: f64,
}

/// Status at the start of the horizon: positive hours means the unit has
/// been on that long, negative hours off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialStatus {
    pub hours: i32,
    #[serde(default)]
    pub output_mw: f64,
}

impl InitialStatus {
    pub fn is_on(&self) -> bool {
        self.hours > 0
    }
}

/// Upper end of a linear piece of the energy cost curve. Pieces start at
/// 0 MW and are listed in increasing order; the last breakpoint is `p_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSegment {
    pub breakpoint: f64,
    /// $/MWh.
    pub marginal_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalUnit {
    pub id: u32,
    pub bus: u32,
    pub p_min: f64,
    pub p_max: f64,
    /// MW/h.
    pub ramp_up: f64,
    pub ramp_down: f64,
    /// Hours.
    pub min_on: u32,
    pub min_off: u32,
    pub initial_status: InitialStatus,
    pub cost_segments: Vec<CostSegment>,
    /// $/h while committed.
    #[serde(default)]
    pub no_load_cost: f64,
    #[serde(default)]
    pub startup_cost: f64,
    #[serde(default)]
    pub shutdown_cost: f64,
    /// Ten-minute corrective capability, MW. Defaults to 10/60 of the ramp.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrective_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrective_dn: Option<f64>,
}

impl ThermalUnit {
    pub fn corrective_up(&self) -> f64 {
        self.corrective_up
            .unwrap_or(CORRECTIVE_FRACTION * self.ramp_up)
    }

    pub fn corrective_dn(&self) -> f64 {
        self.corrective_dn
            .unwrap_or(CORRECTIVE_FRACTION * self.ramp_down)
    }

    /// Energy cost of producing `p` MW, excluding the no-load term.
    pub fn energy_cost(&self, p: f64) -> f64 {
        let mut cost = 0.0;
        let mut start = 0.0;
        for seg in &self.cost_segments {
            if p <= start {
                break;
            }
            let width = p.min(seg.breakpoint) - start;
            cost += width * seg.marginal_cost;
            start = seg.breakpoint;
        }
        cost
    }

    /// Pieces of the cost curve above `p_min` as (width MW, marginal $/MWh).
    pub fn segments_above_min(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start = 0.0f64;
        for seg in &self.cost_segments {
            let lo = start.max(self.p_min);
            let hi = seg.breakpoint.min(self.p_max);
            if hi > lo {
                out.push((hi - lo, seg.marginal_cost));
            }
            start = seg.breakpoint;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Normal,
    TruncatedNormal,
}

fn default_load_sigma() -> f64 {
    0.10
}

fn default_wind_sigma() -> f64 {
    0.20
}

fn default_load_distribution() -> Distribution {
    Distribution::TruncatedNormal
}

fn default_wind_distribution() -> Distribution {
    Distribution::Normal
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadPoint {
    pub bus: u32,
    /// Forecast (most probable) MW per hour.
    pub hourly_mean: Vec<f64>,
    #[serde(default = "default_load_sigma")]
    pub sigma_fraction: f64,
    #[serde(default = "default_load_distribution")]
    pub distribution: Distribution,
    /// Third standardized central moment; used for `normal` inputs only,
    /// truncated normals derive theirs from the truncation.
    #[serde(default)]
    pub skewness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindFarm {
    pub bus: u32,
    pub hourly_mean: Vec<f64>,
    #[serde(default = "default_wind_sigma")]
    pub sigma_fraction: f64,
    #[serde(default = "default_wind_distribution")]
    pub distribution: Distribution,
    #[serde(default)]
    pub skewness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reserves {
    pub spinning: Vec<f64>,
    pub operating: Vec<f64>,
}

fn default_horizon() -> usize {
    24
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemCase {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub units: Vec<ThermalUnit>,
    pub loads: Vec<LoadPoint>,
    pub wind: Vec<WindFarm>,
    pub reserves: Reserves,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack_bus: Option<u32>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

/// Kind and index of an uncertain input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandomSource {
    Load(usize),
    Wind(usize),
}

/// One uncertain input in deviate space: the whole hourly profile of a load
/// point or wind farm is scaled by a single multiplicative deviate with mean 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertainVariable {
    pub source: RandomSource,
    pub sigma: f64,
    pub distribution: Distribution,
    pub skewness: f64,
}

impl SystemCase {
    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn num_hours(&self) -> usize {
        self.horizon
    }

    /// Resolved slack bus id (lowest id when unset).
    pub fn slack(&self) -> u32 {
        self.slack_bus
            .unwrap_or_else(|| self.buses.iter().map(|b| b.id).min().unwrap_or(0))
    }

    pub fn bus_index(&self, id: u32) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn total_load(&self, t: usize) -> f64 {
        self.loads.iter().map(|l| l.hourly_mean[t]).sum()
    }

    pub fn total_wind(&self, t: usize) -> f64 {
        self.wind.iter().map(|w| w.hourly_mean[t]).sum()
    }

    pub fn net_load(&self, t: usize) -> f64 {
        self.total_load(t) - self.total_wind(t)
    }

    /// Uncertain inputs in a fixed order: loads first, then wind farms.
    pub fn uncertain_variables(&self) -> Vec<UncertainVariable> {
        let loads = self
            .loads
            .iter()
            .enumerate()
            .map(|(k, l)| UncertainVariable {
                source: RandomSource::Load(k),
                sigma: l.sigma_fraction,
                distribution: l.distribution,
                skewness: l.skewness,
            });
        let wind = self
            .wind
            .iter()
            .enumerate()
            .map(|(k, w)| UncertainVariable {
                source: RandomSource::Wind(k),
                sigma: w.sigma_fraction,
                distribution: w.distribution,
                skewness: w.skewness,
            });
        loads.chain(wind).collect()
    }

    /// Copy with every input's uncertainty removed.
    pub fn without_uncertainty(&self) -> SystemCase {
        let mut case = self.clone();
        case.loads.iter_mut().for_each(|l| l.sigma_fraction = 0.0);
        case.wind.iter_mut().for_each(|w| w.sigma_fraction = 0.0);
        case
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        validate::validate(self)
    }
}

/// Hourly wind output and per-load demand for one realization.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub load: Vec<f64>,
    pub wind: Vec<f64>,
}

impl SystemCase {
    /// Realization at hour `t` for a deviate vector ordered as
    /// [`SystemCase::uncertain_variables`].
    pub fn realize(&self, deviates: &[f64], t: usize) -> Realization {
        let nl = self.loads.len();
        Realization {
            load: self
                .loads
                .iter()
                .enumerate()
                .map(|(k, l)| (l.hourly_mean[t] * deviates[k]).max(0.0))
                .collect(),
            wind: self
                .wind
                .iter()
                .enumerate()
                .map(|(k, w)| (w.hourly_mean[t] * deviates[nl + k]).max(0.0))
                .collect(),
        }
    }

    pub fn forecast(&self, t: usize) -> Realization {
        Realization {
            load: self.loads.iter().map(|l| l.hourly_mean[t]).collect(),
            wind: self.wind.iter().map(|w| w.hourly_mean[t]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ThermalUnit {
        ThermalUnit {
            id: 1,
            bus: 1,
            p_min: 10.0,
            p_max: 100.0,
            ramp_up: 60.0,
            ramp_down: 30.0,
            min_on: 1,
            min_off: 1,
            initial_status: InitialStatus {
                hours: 1,
                output_mw: 10.0,
            },
            cost_segments: vec![
                CostSegment {
                    breakpoint: 50.0,
                    marginal_cost: 10.0,
                },
                CostSegment {
                    breakpoint: 100.0,
                    marginal_cost: 20.0,
                },
            ],
            no_load_cost: 5.0,
            startup_cost: 0.0,
            shutdown_cost: 0.0,
            corrective_up: None,
            corrective_dn: None,
        }
    }

    #[test]
    fn corrective_defaults_to_ten_minute_ramp() {
        let u = unit();
        assert!((u.corrective_up() - 10.0).abs() < 1e-12);
        assert!((u.corrective_dn() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn energy_cost_follows_pieces() {
        let u = unit();
        assert_eq!(u.energy_cost(0.0), 0.0);
        assert_eq!(u.energy_cost(30.0), 300.0);
        assert_eq!(u.energy_cost(80.0), 500.0 + 600.0);
        let segs = u.segments_above_min();
        assert_eq!(segs, vec![(40.0, 10.0), (50.0, 20.0)]);
    }
}
