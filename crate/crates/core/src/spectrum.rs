//! Spectral partitions, stochastic eigenvalue counting, KPM densities and
//! the entropy rule for choosing the number of intervals.

use std::io::Write;

use rayon::prelude::*;

use crate::chebyshev::{chebyshev_moments, jackson_multipliers, ChebyshevQuadrature, Damping, Interval};
use crate::graph::{EigenSystem, LaplacianOperator};
use crate::rng::{rademacher_vector, rng_from};
use crate::{Error, Result, Scalar};

/// Default relative entropy gain below which the partition size stops growing.
pub const DEFAULT_ELBOW_GAIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Estimated,
    Exact,
}

/// Disjoint intervals `[b_0, b_1), ..., [b_{K-1}, b_K]` covering `[0, lambda_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    boundaries: Vec<T>,
    counts: Option<(Vec<T>, CountMode)>,
}

impl<T: Scalar> Partition<T> {
    /// `K` intervals of equal width `lambda_max / K`.
    pub fn regular(lambda_max: T, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("partition needs at least one interval".into()));
        }
        let width = lambda_max / T::from_usize_lossy(k);
        let mut boundaries: Vec<T> = (0..k).map(|i| width * T::from_usize_lossy(i)).collect();
        boundaries.push(lambda_max);
        Self::from_boundaries(boundaries)
    }

    pub fn from_boundaries(boundaries: Vec<T>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::InvalidParameter(
                "partition needs at least two boundaries".into(),
            ));
        }
        if boundaries[0] != T::zero() {
            return Err(Error::InvalidParameter(format!(
                "partition must start at 0, got {}",
                boundaries[0]
            )));
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) || boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter(
                "partition boundaries must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            boundaries,
            counts: None,
        })
    }

    pub fn with_counts(mut self, counts: Vec<T>, mode: CountMode) -> Result<Self> {
        if counts.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: counts.len(),
            });
        }
        if counts.iter().any(|&c| c < T::zero() || !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "interval counts must be finite and non-negative".into(),
            ));
        }
        self.counts = Some((counts, mode));
        Ok(self)
    }

    /// Number of intervals `K`.
    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn lambda_max(&self) -> T {
        *self.boundaries.last().expect("at least two boundaries")
    }

    pub fn interval(&self, k: usize) -> Interval<T> {
        let (lo, hi) = (self.boundaries[k], self.boundaries[k + 1]);
        if k + 1 == self.len() {
            Interval::closed(lo, hi)
        } else {
            Interval::half_open(lo, hi)
        }
    }

    pub fn intervals(&self) -> Vec<Interval<T>> {
        (0..self.len()).map(|k| self.interval(k)).collect()
    }

    /// Index of the interval containing `lambda`, if any.
    pub fn locate(&self, lambda: T) -> Option<usize> {
        if lambda < T::zero() || lambda > self.lambda_max() {
            return None;
        }
        let k = self.boundaries.partition_point(|&b| b <= lambda);
        Some(k.saturating_sub(1).min(self.len() - 1))
    }

    pub fn counts(&self) -> Option<&[T]> {
        self.counts.as_ref().map(|(c, _)| c.as_slice())
    }

    pub fn count_mode(&self) -> Option<CountMode> {
        self.counts.as_ref().map(|&(_, m)| m)
    }

    pub(crate) fn require_counts(&self) -> Result<&[T]> {
        self.counts()
            .ok_or_else(|| Error::InvalidParameter("partition carries no eigenvalue counts".into()))
    }

    /// Indicator of the union of the listed intervals.
    pub fn union_indicator<'a>(&'a self, members: &'a [usize]) -> impl Fn(T) -> T + Send + Sync + 'a {
        move |lambda| match self.locate(lambda) {
            Some(k) if members.contains(&k) => T::one(),
            _ => T::zero(),
        }
    }
}

/// Per-probe Chebyshev moments `m_i = v^T T_i(L~) v` of Rademacher probes.
#[derive(Debug, Clone)]
pub struct ProbeMoments<T> {
    n: usize,
    lambda_max: T,
    seed: u64,
    per_probe: Vec<Vec<T>>,
}

impl<T: Scalar> ProbeMoments<T> {
    pub fn degree(&self) -> usize {
        self.per_probe[0].len() - 1
    }

    pub fn probes(&self) -> usize {
        self.per_probe.len()
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Averaged moments over the probes in `range`, summed in probe order.
    pub fn mean_over(&self, range: std::ops::Range<usize>) -> Vec<T> {
        let count = T::from_usize_lossy(range.len());
        let mut mean = vec![T::zero(); self.degree() + 1];
        for probe in &self.per_probe[range] {
            for (m, &v) in mean.iter_mut().zip(probe) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= count);
        mean
    }

    pub fn mean(&self) -> Vec<T> {
        self.mean_over(0..self.probes())
    }

    /// Hutchinson estimates of the eigenvalue count of every interval,
    /// clipped at zero, from the probes in `range`.
    pub fn interval_counts_over(&self, partition: &Partition<T>, range: std::ops::Range<usize>) -> Result<Vec<T>> {
        let moments = self.mean_over(range);
        let quadrature = ChebyshevQuadrature::new(self.degree())?;
        partition
            .intervals()
            .into_iter()
            .map(|interval| {
                let filter = quadrature.coefficients(|l| interval.indicator(l), self.lambda_max, Damping::Jackson)?;
                let count = filter
                    .coeffs()
                    .iter()
                    .zip(&moments)
                    .fold(T::zero(), |acc, (&a, &m)| acc + a * m);
                Ok(count.max(T::zero()))
            })
            .collect()
    }

    pub fn interval_counts(&self, partition: &Partition<T>) -> Result<Vec<T>> {
        self.interval_counts_over(partition, 0..self.probes())
    }

    /// Half the mean absolute disagreement, relative to `n`, between the
    /// counts of the two probe halves; `None` with fewer than two probes.
    pub fn count_spread(&self, partition: &Partition<T>) -> Result<Option<T>> {
        let half = self.probes() / 2;
        if half == 0 {
            return Ok(None);
        }
        let a = self.interval_counts_over(partition, 0..half)?;
        let b = self.interval_counts_over(partition, half..2 * half)?;
        let spread = a.iter().zip(&b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y).abs());
        Ok(Some(spread / (T::lit(2.0) * T::from_usize_lossy(self.n))))
    }
}

/// Rademacher probe moments up to `degree`; probe `p` draws from
/// `rng_from(seed, p)` so the result does not depend on scheduling.
pub fn stochastic_moments<T: Scalar>(
    op: &LaplacianOperator<T>,
    degree: usize,
    n_probes: usize,
    seed: u64,
) -> Result<ProbeMoments<T>> {
    if n_probes == 0 {
        return Err(Error::InvalidParameter("need at least one probe vector".into()));
    }
    if degree == 0 {
        return Err(Error::InvalidParameter("moment degree must be at least 1".into()));
    }
    let lambda_max = op.lambda_max();
    let per_probe = (0..n_probes)
        .into_par_iter()
        .map(|p| {
            let mut rng = rng_from(seed, p as u64);
            let v: Vec<T> = rademacher_vector(op.n(), &mut rng);
            chebyshev_moments(op, lambda_max, degree, &v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeMoments {
        n: op.n(),
        lambda_max,
        seed,
        per_probe,
    })
}

/// Estimated eigenvalue count per interval, `(1/n_H) sum_i v_i^T P_k v_i`,
/// with probes shared across intervals.
pub fn hutchinson_interval_counts<T: Scalar>(
    op: &LaplacianOperator<T>,
    partition: &Partition<T>,
    degree: usize,
    n_probes: usize,
    seed: u64,
) -> Result<Vec<T>> {
    stochastic_moments(op, degree, n_probes, seed)?.interval_counts(partition)
}

/// Attaches Hutchinson counts to `partition`.
pub fn estimate_counts<T: Scalar>(
    op: &LaplacianOperator<T>,
    partition: Partition<T>,
    degree: usize,
    n_probes: usize,
    seed: u64,
) -> Result<Partition<T>> {
    let counts = hutchinson_interval_counts(op, &partition, degree, n_probes, seed)?;
    partition.with_counts(counts, CountMode::Estimated)
}

/// Number of eigenvalues per interval from a dense eigendecomposition.
pub fn exact_interval_counts<T: Scalar>(eig: &EigenSystem<T>, partition: &Partition<T>) -> Vec<usize> {
    let mut counts = vec![0; partition.len()];
    for &lambda in eig.values() {
        let clamped = lambda.min(partition.lambda_max());
        if let Some(k) = partition.locate(clamped) {
            counts[k] += 1;
        }
    }
    counts
}

/// Attaches exact counts to `partition`.
pub fn with_exact_counts<T: Scalar>(eig: &EigenSystem<T>, partition: Partition<T>) -> Result<Partition<T>> {
    let counts = exact_interval_counts(eig, &partition)
        .into_iter()
        .map(T::from_usize_lossy)
        .collect();
    partition.with_counts(counts, CountMode::Exact)
}

/// Kernel-polynomial estimate of the cumulative spectral distribution.
///
/// Stored as a monotone piecewise-linear table on `[0, lambda_max]`.
#[derive(Debug, Clone)]
pub struct SpectralDensityEstimate<T> {
    degree: usize,
    n_probes: usize,
    seed: u64,
    lambda_max: T,
    moments: Vec<T>,
    nodes: Vec<T>,
    cdf: Vec<T>,
}

impl<T: Scalar> SpectralDensityEstimate<T> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_probes(&self) -> usize {
        self.n_probes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    /// Normalised moments `mu_i = tr T_i(L~) / n`.
    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn table(&self) -> &[T] {
        &self.cdf
    }

    /// Damped density on `[0, lambda_max]`, clipped at zero.
    pub fn density(&self, lambda: T) -> T {
        let x = (T::lit(2.0) * lambda / self.lambda_max - T::one())
            .max(-T::one())
            .min(T::one());
        let theta = x.acos();
        let sin = theta.sin().max(T::lit(1e-12));
        let h = kpm_theta_density(&self.moments, &jackson_multipliers(self.degree), theta);
        // d(lambda) = (lambda_max / 2) sin(theta) d(theta)
        h / (self.lambda_max / T::lit(2.0) * sin)
    }

    /// Cumulative distribution `omega_0(lambda)`.
    pub fn cdf(&self, lambda: T) -> T {
        if lambda <= self.nodes[0] {
            return self.cdf[0];
        }
        if lambda >= self.lambda_max {
            return T::one();
        }
        let i = self.nodes.partition_point(|&x| x <= lambda);
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let (y0, y1) = (self.cdf[i - 1], self.cdf[i]);
        y0 + (y1 - y0) * (lambda - x0) / (x1 - x0)
    }
}

// (1/pi) [g_0 mu_0 + 2 sum_i g_i mu_i cos(i theta)], clipped at zero
fn kpm_theta_density<T: Scalar>(moments: &[T], damping: &[T], theta: T) -> T {
    let mut acc = damping[0] * moments[0];
    for i in 1..moments.len() {
        acc += T::lit(2.0) * damping[i] * moments[i] * (T::from_usize_lossy(i) * theta).cos();
    }
    (acc / T::lit(std::f64::consts::PI)).max(T::zero())
}

/// KPM estimate of the cumulative spectral distribution `omega_0`.
pub fn kpm_cumulative_density<T: Scalar>(
    op: &LaplacianOperator<T>,
    degree: usize,
    n_probes: usize,
    seed: u64,
) -> Result<SpectralDensityEstimate<T>> {
    if degree < 8 {
        return Err(Error::InvalidParameter(format!(
            "KPM degree must be at least 8, got {degree}"
        )));
    }
    let probes = stochastic_moments(op, degree, n_probes, seed)?;
    Ok(density_from_moments(&probes, op.n()))
}

/// Builds the KPM table from precomputed probe moments.
pub fn density_from_moments<T: Scalar>(probes: &ProbeMoments<T>, n: usize) -> SpectralDensityEstimate<T> {
    let degree = probes.degree();
    let lambda_max = probes.lambda_max();
    let inv_n = T::one() / T::from_usize_lossy(n);
    let moments: Vec<T> = probes.mean().into_iter().map(|m| m * inv_n).collect();
    let damping = jackson_multipliers::<T>(degree);

    // Trapezoid in theta from theta = pi (lambda = 0) down to theta = 0.
    let steps = (8 * (degree + 1)).max(1024);
    let pi = T::lit(std::f64::consts::PI);
    let mut nodes = Vec::with_capacity(steps + 1);
    let mut cdf = Vec::with_capacity(steps + 1);
    let mut acc = T::zero();
    let mut prev_h = T::zero();
    for s in 0..=steps {
        let theta = pi * (T::one() - T::from_usize_lossy(s) / T::from_usize_lossy(steps));
        let h = kpm_theta_density(&moments, &damping, theta);
        if s > 0 {
            acc += (h + prev_h) * pi / T::from_usize_lossy(steps) / T::lit(2.0);
        }
        prev_h = h;
        nodes.push(lambda_max * (theta.cos() + T::one()) / T::lit(2.0));
        cdf.push(acc);
    }
    let total = acc;
    if total > T::zero() {
        cdf.iter_mut().for_each(|c| *c /= total);
    }
    *cdf.last_mut().expect("non-empty table") = T::one();
    nodes[0] = T::zero();
    *nodes.last_mut().expect("non-empty table") = lambda_max;
    SpectralDensityEstimate {
        degree,
        n_probes: probes.probes(),
        seed: probes.seed(),
        lambda_max,
        moments,
        nodes,
        cdf,
    }
}

/// `E = -sum_k p_k ln p_k` with `p_k = n_k / sum n`.
pub fn partition_entropy<T: Scalar>(counts: &[T]) -> Result<T> {
    if counts.iter().any(|&c| c < T::zero() || !c.is_finite()) {
        return Err(Error::InvalidParameter("counts must be finite and non-negative".into()));
    }
    let total: T = counts.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::InvalidParameter(
            "entropy of all-zero counts is undefined".into(),
        ));
    }
    Ok(counts
        .iter()
        .filter(|&&c| c > T::zero())
        .map(|&c| {
            let p = c / total;
            -p * p.ln()
        })
        .sum())
}

/// `sum_k |est_k - exact_k| / sum_k exact_k`
pub fn mean_relative_error<T: Scalar>(estimated: &[T], exact: &[T]) -> Result<T> {
    if estimated.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            actual: estimated.len(),
        });
    }
    let total: T = exact.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::InvalidParameter("exact counts sum to zero".into()));
    }
    let err = estimated
        .iter()
        .zip(exact)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
    Ok(err / total)
}

/// Entropy and count-stability diagnostics for one partition size.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyDiagnostic<T> {
    pub k: usize,
    pub entropy: T,
    pub mre_proxy: Option<T>,
}

/// Outcome of [`select_partition`].
#[derive(Debug, Clone)]
pub struct PartitionSelection<T> {
    pub k_elbow: usize,
    /// Regular partition at `k_elbow`, carrying estimated counts.
    pub partition: Partition<T>,
    pub diagnostics: Vec<EntropyDiagnostic<T>>,
}

impl<T: Scalar> PartitionSelection<T> {
    /// CSV with columns `K,entropy,mre_proxy` (empty proxy when unavailable).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["K", "entropy", "mre_proxy"])?;
        for d in &self.diagnostics {
            writer.write_record([
                d.k.to_string(),
                format!("{:.10}", d.entropy.to_f64_lossy()),
                d.mre_proxy
                    .map(|m| format!("{:.10}", m.to_f64_lossy()))
                    .unwrap_or_default(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Smallest grid value whose forward relative entropy gain
/// `(E(K_next) - E(K)) / E(K_next)` falls below `gain_threshold`; the last
/// grid value when the entropy never settles.
pub fn elbow<T: Scalar>(ks: &[usize], entropies: &[T], gain_threshold: T) -> usize {
    for i in 0..ks.len().saturating_sub(1) {
        let next = entropies[i + 1];
        let gain = if next > T::zero() {
            (next - entropies[i]) / next
        } else {
            T::zero()
        };
        if gain < gain_threshold {
            return ks[i];
        }
    }
    *ks.last().expect("non-empty grid")
}

/// Scans regular partitions over `k_grid` with one set of shared probes and
/// picks the entropy elbow.
pub fn select_partition<T: Scalar>(
    op: &LaplacianOperator<T>,
    k_grid: &[usize],
    degree: usize,
    n_probes: usize,
    seed: u64,
    gain_threshold: T,
) -> Result<PartitionSelection<T>> {
    if k_grid.len() < 3 || k_grid.windows(2).any(|w| w[0] >= w[1]) || k_grid[0] == 0 {
        return Err(Error::InvalidParameter(
            "K grid must hold at least three increasing positive values".into(),
        ));
    }
    let probes = stochastic_moments(op, degree, n_probes, seed)?;
    let mut diagnostics = Vec::with_capacity(k_grid.len());
    let mut partitions = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let partition = Partition::regular(op.lambda_max(), k)?;
        let counts = probes.interval_counts(&partition)?;
        let entropy = partition_entropy(&counts).map_err(|_| {
            Error::InvalidParameter(format!(
                "entropy not computable at K = {k}: all estimated counts vanish"
            ))
        })?;
        diagnostics.push(EntropyDiagnostic {
            k,
            entropy,
            mre_proxy: probes.count_spread(&partition)?,
        });
        partitions.push(partition.with_counts(counts, CountMode::Estimated)?);
    }
    let entropies: Vec<T> = diagnostics.iter().map(|d| d.entropy).collect();
    let k_elbow = elbow(k_grid, &entropies, gain_threshold);
    let index = k_grid.iter().position(|&k| k == k_elbow).expect("elbow from grid");
    Ok(PartitionSelection {
        k_elbow,
        partition: partitions.swap_remove(index),
        diagnostics,
    })
}
