//! Seeded Monte-Carlo sampling of load and wind deviates and fast-forward
//! scenario reduction.

mod reduce;
mod truncnorm;

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Distribution, SystemCase, UncertainVariable};
use crate::pem::RandomInput;

pub use reduce::{kantorovich_distance, reduce, reduce_plain};
pub use truncnorm::{truncated_moments, TruncatedDeviate};

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("target scenario count must be at least 1")]
    ZeroTarget,
    #[error("target {target} exceeds set size {size}")]
    TargetTooLarge { target: usize, size: usize },
    #[error("scenario set is empty")]
    Empty,
    #[error("scenario csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("scenario csv row {row}: {message}")]
    Format { row: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Raw,
    Reduced,
}

/// Scenarios as multiplicative deviates (one column per uncertain variable,
/// ordered as `SystemCase::uncertain_variables`).
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSet {
    pub deviates: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
    pub seed: u64,
    pub provenance: Provenance,
}

impl ScenarioSet {
    pub fn len(&self) -> usize {
        self.deviates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deviates.is_empty()
    }

    pub fn num_variables(&self) -> usize {
        self.deviates.first().map_or(0, Vec::len)
    }

    /// Single scenario at the forecast.
    pub fn forecast(num_variables: usize) -> Self {
        ScenarioSet {
            deviates: vec![vec![1.0; num_variables]],
            probabilities: vec![1.0],
            seed: 0,
            provenance: Provenance::Raw,
        }
    }

    pub fn weighted_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.num_variables()];
        for (p, row) in self.probabilities.iter().zip(&self.deviates) {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += p * x;
            }
        }
        mean
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), StochasticError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["probability".to_string()];
        header.extend((1..=self.num_variables()).map(|k| format!("x{k}")));
        w.write_record(&header)?;
        for (p, row) in self.probabilities.iter().zip(&self.deviates) {
            let mut rec = vec![p.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(
        input: R,
        seed: u64,
        provenance: Provenance,
    ) -> Result<Self, StochasticError> {
        let mut r = csv::Reader::from_reader(input);
        let mut set = ScenarioSet {
            deviates: vec![],
            probabilities: vec![],
            seed,
            provenance,
        };
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let vals: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let vals = vals.map_err(|e| StochasticError::Format {
                row: row + 1,
                message: e.to_string(),
            })?;
            let Some((&p, rest)) = vals.split_first() else {
                return Err(StochasticError::Format {
                    row: row + 1,
                    message: "empty record".into(),
                });
            };
            if !(p > 0.0) {
                return Err(StochasticError::Format {
                    row: row + 1,
                    message: format!("probability {p} must be > 0"),
                });
            }
            set.probabilities.push(p);
            set.deviates.push(rest.to_vec());
        }
        if set.is_empty() {
            return Err(StochasticError::Empty);
        }
        Ok(set)
    }
}

/// Moments of each uncertain variable in deviate space, for point estimation.
pub fn deviate_moments(vars: &[UncertainVariable]) -> Vec<RandomInput> {
    vars.iter()
        .map(|v| match v.distribution {
            _ if v.sigma == 0.0 => RandomInput {
                mean: 1.0,
                std: 0.0,
                skewness: 0.0,
            },
            Distribution::TruncatedNormal => {
                let (mean, std, skewness) = TruncatedDeviate::for_sigma(v.sigma).moments();
                RandomInput {
                    mean,
                    std,
                    skewness,
                }
            }
            Distribution::Normal => RandomInput {
                mean: 1.0,
                std: v.sigma,
                skewness: v.skewness,
            },
        })
        .collect()
}

/// Draws `n` equiprobable scenarios. Truncated-normal deviates are sampled by
/// rejection; normal deviates are clipped at zero.
pub fn sample(case: &SystemCase, n: usize, seed: u64) -> ScenarioSet {
    let vars = case.uncertain_variables();
    let trunc: Vec<Option<TruncatedDeviate>> = vars
        .iter()
        .map(|v| {
            (v.distribution == Distribution::TruncatedNormal)
                .then(|| TruncatedDeviate::for_sigma(v.sigma))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deviates = Vec::with_capacity(n);
    for _ in 0..n {
        let row = vars
            .iter()
            .zip(&trunc)
            .map(|(v, tr)| match tr {
                Some(d) if d.scale > 0.0 => loop {
                    let z: f64 = rng.sample(StandardNormal);
                    let x = 1.0 + d.scale * z;
                    if x >= d.lower && x <= d.upper {
                        break x;
                    }
                },
                Some(_) => 1.0,
                None => {
                    let z: f64 = rng.sample(StandardNormal);
                    (1.0 + v.sigma * z).max(0.0)
                }
            })
            .collect();
        deviates.push(row);
    }
    ScenarioSet {
        deviates,
        probabilities: vec![1.0 / n as f64; n],
        seed,
        provenance: Provenance::Raw,
    }
}
