use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Mean, standard deviation and skewness of N(mu, s^2) truncated to [a, b].
pub fn truncated_moments(mu: f64, s: f64, a: f64, b: f64) -> (f64, f64, f64) {
    let (al, be) = ((a - mu) / s, (b - mu) / s);
    let z = cdf(be) - cdf(al);
    let (pa, pb) = (pdf(al), pdf(be));
    // standardized raw moments via E[X^k] = (k-1)E[X^(k-2)] + (a^(k-1)p(a) - b^(k-1)p(b))/Z
    let m1 = (pa - pb) / z;
    let m2 = 1.0 + (al * pa - be * pb) / z;
    let m3 = 2.0 * m1 + (al * al * pa - be * be * pb) / z;
    let var = m2 - m1 * m1;
    let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
    (mu + s * m1, s * var.sqrt(), c3 / var.powf(1.5))
}

/// Pre-truncation parameters of a load deviate: location 1, truncated to
/// [max(0, 1 - 3 s), 1 + 3 s], with `s` chosen so the truncated standard
/// deviation equals `sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedDeviate {
    pub scale: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TruncatedDeviate {
    pub fn bounds(scale: f64) -> (f64, f64) {
        ((1.0 - 3.0 * scale).max(0.0), 1.0 + 3.0 * scale)
    }

    pub fn for_sigma(sigma: f64) -> Self {
        if sigma == 0.0 {
            return TruncatedDeviate {
                scale: 0.0,
                lower: 1.0,
                upper: 1.0,
            };
        }
        let post = |s: f64| {
            let (a, b) = Self::bounds(s);
            truncated_moments(1.0, s, a, b).1
        };
        // post(s) is increasing in s; bracket then bisect
        let (mut lo, mut hi) = (sigma, sigma);
        while post(hi) < sigma {
            hi *= 1.5;
        }
        while post(lo) > sigma {
            lo /= 1.5;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if post(mid) < sigma {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let scale = 0.5 * (lo + hi);
        let (lower, upper) = Self::bounds(scale);
        TruncatedDeviate {
            scale,
            lower,
            upper,
        }
    }

    pub fn moments(&self) -> (f64, f64, f64) {
        if self.scale == 0.0 {
            return (1.0, 0.0, 0.0);
        }
        truncated_moments(1.0, self.scale, self.lower, self.upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_three_sigma_truncation() {
        // std ratio for +-3 truncation: sqrt(1 - 6 p(3) / (2 P(3) - 1))
        let (m, s, k) = truncated_moments(0.0, 1.0, -3.0, 3.0);
        let ratio = (1.0 - 6.0 * pdf(3.0) / (2.0 * cdf(3.0) - 1.0)).sqrt();
        assert!(m.abs() < 1e-15 && k.abs() < 1e-12);
        assert!((s - ratio).abs() < 1e-12);
        let d = TruncatedDeviate::for_sigma(0.1);
        assert!((d.moments().1 - 0.1).abs() < 1e-12);
        assert!(d.scale > 0.1);
    }

    #[test]
    fn one_sided_truncation_is_right_skewed() {
        let d = TruncatedDeviate::for_sigma(0.5);
        assert_eq!(d.lower, 0.0);
        let (m, s, k) = d.moments();
        assert!(m > 1.0 && k > 0.0);
        assert!((s - 0.5).abs() < 1e-10);
    }
}
