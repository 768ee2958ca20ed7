//! Two-point estimation (Hong's 2m scheme).
//!
//! Each of the m random inputs is replaced by two concentrations matched to
//! its mean, standard deviation and skewness. An output's raw moments are
//! then weighted sums over the 2m deterministic evaluations.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PemError {
    #[error("at least one random input with positive standard deviation is required")]
    NoInputs,
    #[error("m must be at least 1")]
    ZeroCount,
    #[error("degenerate concentration pair: xi1 == xi2 == {0}")]
    Degenerate(f64),
    #[error("input {index}: {message}")]
    BadInput { index: usize, message: String },
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("evaluations have inconsistent output lengths")]
    Shape,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomInput {
    pub mean: f64,
    pub std: f64,
    /// Third standardized central moment.
    pub skewness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Concentration {
    /// Index into the caller's input list.
    pub variable: usize,
    /// 1 or 2.
    pub side: u8,
    pub xi: f64,
    pub location: f64,
    pub weight: f64,
    /// Every input at its mean except `variable`, which sits at `location`.
    pub point: Vec<f64>,
}

pub fn standard_locations(skewness: f64, m: usize) -> Result<(f64, f64), PemError> {
    if m == 0 {
        return Err(PemError::ZeroCount);
    }
    let half = skewness / 2.0;
    let root = (m as f64 + half * half).sqrt();
    Ok((half + root, half - root))
}

pub fn weights(xi1: f64, xi2: f64, m: usize) -> Result<(f64, f64), PemError> {
    if m == 0 {
        return Err(PemError::ZeroCount);
    }
    if xi1 == xi2 {
        return Err(PemError::Degenerate(xi1));
    }
    let inv_m = 1.0 / m as f64;
    let w1 = -inv_m * xi2 / (xi1 - xi2);
    // second weight taken as the complement so the pair sums to 1/m exactly
    Ok((w1, inv_m - w1))
}

/// Builds the 2m concentrations. Inputs with zero standard deviation do not
/// count toward m and stay at their mean in every point.
pub fn build_concentrations(inputs: &[RandomInput]) -> Result<Vec<Concentration>, PemError> {
    for (index, x) in inputs.iter().enumerate() {
        if !(x.mean.is_finite() && x.std.is_finite() && x.skewness.is_finite()) {
            return Err(PemError::BadInput {
                index,
                message: "moments must be finite".into(),
            });
        }
        if x.std < 0.0 {
            return Err(PemError::BadInput {
                index,
                message: format!("negative std {}", x.std),
            });
        }
    }
    let random: Vec<usize> = (0..inputs.len()).filter(|&l| inputs[l].std > 0.0).collect();
    let m = random.len();
    if m == 0 {
        return Err(PemError::NoInputs);
    }
    let means: Vec<f64> = inputs.iter().map(|x| x.mean).collect();
    let mut out = Vec::with_capacity(2 * m);
    for &l in &random {
        let x = inputs[l];
        let (xi1, xi2) = standard_locations(x.skewness, m)?;
        let (w1, w2) = weights(xi1, xi2, m)?;
        for (side, xi, w) in [(1u8, xi1, w1), (2u8, xi2, w2)] {
            let location = x.mean + xi * x.std;
            let mut point = means.clone();
            point[l] = location;
            out.push(Concentration {
                variable: l,
                side,
                xi,
                location,
                weight: w,
                point,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimate {
    /// `raw[j-1][k]` is the j-th raw moment of output component k.
    pub raw: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Weighted raw moments of a vector output, j = 1..=j_max (at least 2 are
/// always computed so the standard deviation is available).
pub fn estimate_moments(
    evaluations: &[(f64, Vec<f64>)],
    j_max: usize,
) -> Result<MomentEstimate, PemError> {
    let total: f64 = evaluations.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(PemError::WeightSum(total));
    }
    let dim = evaluations.first().map_or(0, |(_, z)| z.len());
    if evaluations.iter().any(|(_, z)| z.len() != dim) {
        return Err(PemError::Shape);
    }
    let jn = j_max.max(2);
    let mut raw = vec![vec![0.0; dim]; jn];
    for (w, z) in evaluations {
        for (k, &v) in z.iter().enumerate() {
            let mut pow = 1.0;
            for moment in raw.iter_mut() {
                pow *= v;
                moment[k] += w * pow;
            }
        }
    }
    let mean = raw[0].clone();
    let std = (0..dim)
        .map(|k| (raw[1][k] - mean[k] * mean[k]).max(0.0).sqrt())
        .collect();
    raw.truncate(j_max.max(1));
    Ok(MomentEstimate { raw, mean, std })
}

/// Scalar convenience wrapper: weighted mean of `f` over the concentrations.
pub fn expected_value(concentrations: &[Concentration], mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    concentrations.iter().map(|c| c.weight * f(&c.point)).sum()
}
