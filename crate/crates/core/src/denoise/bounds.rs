use rand::Rng;
use rand_distr::ChiSquared;
use rayon::prelude::*;

use crate::rng::rng_from;
use crate::stats::{chi2_cdf, chi2_sf};
use crate::{Error, Result};

/// Direction of a tail event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Upper,
    Lower,
}

fn extreme_counts(counts: &[f64]) -> Result<(usize, f64, f64)> {
    if counts.is_empty() {
        return Err(Error::TooFewIntervals {
            needed: 1,
            available: 0,
        });
    }
    if counts.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::Domain("interval counts must be positive".into()));
    }
    let lo = counts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = counts.iter().copied().fold(0.0, f64::max);
    Ok((counts.len(), lo, hi))
}

/// Level of the median-estimator tail event controlled by
/// [`median_concentration_bound`]: `sigma^2 (1 + 2t) / beta` above,
/// `beta sigma^2 (1 - t)` below, with `beta = n_min / n_max`.
pub fn median_event_level(t: f64, counts: &[f64], sigma: f64, tail: Tail) -> Result<f64> {
    let (_, lo, hi) = extreme_counts(counts)?;
    let beta = lo / hi;
    let var = sigma * sigma;
    Ok(match tail {
        Tail::Upper => var * (1.0 + 2.0 * t) / beta,
        Tail::Lower => beta * var * (1.0 - t),
    })
}

/// Bound on `P(sigma_med^2 >= level)` (upper) or `P(sigma_med^2 <= level)`
/// (lower), levels from [`median_event_level`].
///
/// `exp(K/2 ln(4 p (1 - p)))` with `p = P(chi2(n_max) >= n_max (1 + 2t))`
/// above and `p = P(chi2(n_min) <= n_min (1 - t))` below.
pub fn median_concentration_bound(t: f64, counts: &[f64], tail: Tail) -> Result<f64> {
    let (k, lo, hi) = extreme_counts(counts)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("deviation t must be nonnegative, got {t}")));
    }
    let p = match tail {
        Tail::Upper => chi2_sf(hi * (1.0 + 2.0 * t), hi)?,
        Tail::Lower => {
            if t > 1.0 {
                return Err(Error::Domain(format!("lower deviation t must lie in [0, 1], got {t}")));
            }
            let p = chi2_cdf(lo * (1.0 - t), lo)?;
            if p > 0.5 {
                return Err(Error::Domain(format!(
                    "lower tail probability {p} exceeds one half; the bound does not apply"
                )));
            }
            p
        }
    };
    let q = 4.0 * p * (1.0 - p);
    Ok(((k as f64 / 2.0) * q.ln()).exp().min(1.0))
}

/// Sub-gamma bounds for the untrimmed mean estimator:
/// `P(sigma_mean^2 - sigma^2 >= t)` and `P(sigma_mean^2 - sigma^2 <= -t)`.
///
/// With `V = 2 sigma^4 sum_k 1/n_k` and `B = 2 sigma^2 / n_min`, the upper
/// tail is `exp(-K^2 t^2 / (V (1 + B + sqrt(1 + 2 B K t / V))))` and the
/// lower tail `exp(-K^2 t^2 / (2 V))` for `t <= sigma^2`.
pub fn mean_concentration_bound(t: f64, counts: &[f64], sigma: f64, tail: Tail) -> Result<f64> {
    let (k, lo, _) = extreme_counts(counts)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("deviation t must be nonnegative, got {t}")));
    }
    let var = sigma * sigma;
    let v = 2.0 * var * var * counts.iter().map(|n| 1.0 / n).sum::<f64>();
    let kt2 = (k as f64 * t).powi(2);
    Ok(match tail {
        Tail::Upper => {
            let b = 2.0 * var / lo;
            let root = (1.0 + 2.0 * b * k as f64 * t / v).sqrt();
            (-kt2 / (v * (1.0 + b + root))).exp()
        }
        Tail::Lower => {
            if t > var {
                return Err(Error::Domain(format!(
                    "lower deviation t must not exceed sigma^2, got {t}"
                )));
            }
            (-kt2 / (2.0 * v)).exp()
        }
    })
}

/// Samples used by [`chi2_difference_quantile`].
pub const DIFFERENCE_SAMPLES: usize = 1_000_000;
const DIFFERENCE_SEED: u64 = 0x6c6f_636c_6574;
const CHUNKS: usize = 16;

/// Monte Carlo `p`-quantile of `scale_a chi2(df_a) - chi2(df_b)`, with a
/// fixed seed so repeated calls agree.
pub fn chi2_difference_quantile(p: f64, df_a: f64, df_b: f64, scale_a: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let a = ChiSquared::new(df_a).map_err(|e| Error::Domain(e.to_string()))?;
    let b = ChiSquared::new(df_b).map_err(|e| Error::Domain(e.to_string()))?;
    let per_chunk = DIFFERENCE_SAMPLES / CHUNKS;
    let mut samples: Vec<f64> = (0..CHUNKS)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = rng_from(DIFFERENCE_SEED, c as u64);
            (0..per_chunk)
                .map(|_| scale_a * rng.sample(a) - rng.sample(b))
                .collect::<Vec<_>>()
        })
        .collect();
    let idx = ((samples.len() - 1) as f64 * p).round() as usize;
    let (_, q, _) = samples.select_nth_unstable_by(idx, f64::total_cmp);
    Ok(*q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_bound_is_vacuous_at_zero_and_decreasing() {
        let counts = vec![2000.0; 20];
        let b0 = median_concentration_bound(0.0, &counts, Tail::Upper).unwrap();
        assert!(b0 > 0.9);
        let mut prev = b0;
        for t in [0.05, 0.1, 0.2, 0.5, 1.0] {
            let b = median_concentration_bound(t, &counts, Tail::Upper).unwrap();
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn lower_tail_preconditions() {
        let counts = vec![45.0; 20];
        assert!(median_concentration_bound(1.5, &counts, Tail::Lower).is_err());
        assert!(median_concentration_bound(0.5, &counts, Tail::Lower).unwrap() < 1e-3);
        assert!(mean_concentration_bound(2.0, &counts, 1.0, Tail::Lower).is_err());
    }

    #[test]
    fn difference_quantiles() {
        let med = chi2_difference_quantile(0.5, 10.0, 10.0, 1.0).unwrap();
        // std of the difference is sqrt(40); the sample median error is far below 0.05
        assert!(med.abs() < 0.05);
        let hi = chi2_difference_quantile(0.975, 10.0, 10.0, 1.0).unwrap();
        assert!(hi > 0.0);
        assert_eq!(hi, chi2_difference_quantile(0.975, 10.0, 10.0, 1.0).unwrap());
        let shifted = chi2_difference_quantile(0.5, 5.0, 5.0, 2.0).unwrap();
        // median of 2 chi2(5) - chi2(5) sits a little below the mean 5
        assert!(shifted > 3.0 && shifted < 5.0);
        assert!(chi2_difference_quantile(1.0, 5.0, 5.0, 1.0).is_err());
    }
}
