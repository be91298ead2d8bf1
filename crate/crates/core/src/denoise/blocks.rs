use crate::calculus::{ChebyshevCalculus, ScalarFilter, SpectralCalculus};
use crate::chebyshev::Damping;
use crate::graph::LaplacianOperator;
use crate::spectrum::Partition;
use crate::stats::chi2_sf;
use crate::{Error, Result, Scalar};

/// Intervals whose (estimated) eigenvalue count falls below this are left
/// out of every statistic.
pub const DF_FLOOR: f64 = 0.5;

/// Per-interval energies `||f_k||^2`, degrees of freedom `n_k` and block
/// values `c_k = ||f_k||^2 / n_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats<T> {
    pub energies: Vec<T>,
    pub dfs: Vec<T>,
    /// `c_k`; zero for intervals below the df floor.
    pub values: Vec<T>,
    pub valid: Vec<bool>,
}

impl<T: Scalar> BlockStats<T> {
    pub fn from_energies(energies: Vec<T>, dfs: Vec<T>) -> Result<Self> {
        if energies.len() != dfs.len() {
            return Err(Error::DimensionMismatch {
                expected: dfs.len(),
                actual: energies.len(),
            });
        }
        let floor = T::lit(DF_FLOOR);
        let valid: Vec<bool> = dfs.iter().map(|&d| d >= floor).collect();
        if !valid.iter().any(|&v| v) {
            return Err(Error::TooFewIntervals {
                needed: 1,
                available: 0,
            });
        }
        let values = energies
            .iter()
            .zip(&dfs)
            .zip(&valid)
            .map(|((&e, &d), &ok)| if ok { e / d } else { T::zero() })
            .collect();
        Ok(Self {
            energies,
            dfs,
            values,
            valid,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Valid block values sorted in decreasing order.
    pub fn sorted_values(&self) -> Vec<T> {
        let mut v: Vec<T> = self
            .values
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .map(|(&c, _)| c)
            .collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    }
}

/// Projector filters `1_{I_k}` of every interval of `partition`.
pub fn projector_filters<T: Scalar>(partition: &Partition<T>) -> Vec<ScalarFilter<'static, T>> {
    partition
        .intervals()
        .into_iter()
        .map(|interval| Box::new(move |l: T| interval.indicator(l)) as ScalarFilter<'static, T>)
        .collect()
}

/// Block statistics with energies `<f, P_k f>` from the given backend.
///
/// With a Chebyshev backend the projectors should be damped; the energies
/// are then the same quadratic forms whose traces the Hutchinson counts
/// estimate.
pub fn interval_statistics<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    partition: &Partition<T>,
    f: &[T],
) -> Result<BlockStats<T>> {
    let dfs = partition.require_counts()?.to_vec();
    let bank = calc.prepare(&projector_filters(partition))?;
    let energies = calc
        .quadratic_forms(&bank, f)?
        .into_iter()
        .map(|e| e.max(T::zero()))
        .collect();
    BlockStats::from_energies(energies, dfs)
}

/// Block statistics with Jackson-damped projectors of degree `degree`.
pub fn block_statistics<T: Scalar>(
    op: &LaplacianOperator<T>,
    partition: &Partition<T>,
    f: &[T],
    degree: usize,
) -> Result<BlockStats<T>> {
    let calc = ChebyshevCalculus::new(op, degree, Damping::Jackson)?;
    interval_statistics(&calc, partition, f)
}

fn require_valid<T: Scalar>(stats: &BlockStats<T>, needed: usize) -> Result<Vec<T>> {
    let sorted = stats.sorted_values();
    if sorted.len() < needed {
        return Err(Error::TooFewIntervals {
            needed,
            available: sorted.len(),
        });
    }
    Ok(sorted)
}

/// Median noise-level estimate: the square root of the `ceil(K/2)`-th
/// largest valid block value.
pub fn sigma_med<T: Scalar>(stats: &BlockStats<T>) -> Result<T> {
    let sorted = require_valid(stats, 3)?;
    let k = sorted.len();
    Ok(sorted[k.div_ceil(2) - 1].sqrt())
}

/// Trimmed-mean noise-level estimate: block values sorted decreasingly and
/// averaged over positions `r..=K-r` (1-based).
pub fn sigma_mean<T: Scalar>(stats: &BlockStats<T>, r: usize) -> Result<T> {
    let sorted = require_valid(stats, 2)?;
    let k = sorted.len();
    if r < 1 || r > k / 2 {
        return Err(Error::InvalidParameter(format!(
            "trim parameter r = {r} must lie in 1..={}",
            k / 2
        )));
    }
    let kept = &sorted[r - 1..k - r];
    let total: T = kept.iter().copied().sum();
    Ok((total / T::from_usize_lossy(kept.len())).sqrt())
}

/// `t = sigma sqrt(-2 ln(alpha / 4))`
pub fn gaussian_tail_threshold<T: Scalar>(alpha: T, sigma: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(sigma * (-T::lit(2.0) * (alpha / T::lit(4.0)).ln()).sqrt())
}

/// Outcome of the chi-square support test.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEstimate<T> {
    /// Intervals with `p_k <= alpha`.
    pub selected: Vec<usize>,
    /// Every other interval, df-floored ones included.
    pub complement: Vec<usize>,
    /// Intervals excluded by the df floor (`p_k = 1`).
    pub floored: Vec<usize>,
    pub p_values: Vec<f64>,
    pub alpha: T,
    pub sigma: T,
}

/// `p_k = P(sigma^2 chi2(n_k) > ||f_k||^2)`; intervals with `p_k <= alpha`
/// form the support estimate.
pub fn support_from_statistics<T: Scalar>(stats: &BlockStats<T>, sigma: T, alpha: T) -> Result<SupportEstimate<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::Domain(format!("noise level must be positive, got {sigma}")));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let var = (sigma * sigma).to_f64_lossy();
    let mut estimate = SupportEstimate {
        selected: Vec::new(),
        complement: Vec::new(),
        floored: Vec::new(),
        p_values: Vec::with_capacity(stats.len()),
        alpha,
        sigma,
    };
    for k in 0..stats.len() {
        let p = if stats.valid[k] {
            chi2_sf(stats.energies[k].to_f64_lossy() / var, stats.dfs[k].to_f64_lossy())?
        } else {
            estimate.floored.push(k);
            1.0
        };
        estimate.p_values.push(p);
        if p <= alpha.to_f64_lossy() {
            estimate.selected.push(k);
        } else {
            estimate.complement.push(k);
        }
    }
    Ok(estimate)
}

/// Chi-square support approximation of a noisy signal.
pub fn support_approximation<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    partition: &Partition<T>,
    f: &[T],
    sigma: T,
    alpha: T,
) -> Result<SupportEstimate<T>> {
    let stats = interval_statistics(calc, partition, f)?;
    support_from_statistics(&stats, sigma, alpha)
}
