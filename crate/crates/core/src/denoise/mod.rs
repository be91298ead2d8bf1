//! Block statistics, noise-level estimation, chi-square support detection
//! and thresholding denoisers built on LocLets and Parseval frames.

mod blocks;
mod bounds;
mod shrink;

use std::fmt;

pub use blocks::{
    block_statistics, gaussian_tail_threshold, interval_statistics, projector_filters, sigma_mean, sigma_med,
    support_approximation, support_from_statistics, BlockStats, SupportEstimate, DF_FLOOR,
};
pub use bounds::{
    chi2_difference_quantile, mean_concentration_bound, median_concentration_bound, median_event_level, Tail,
    DIFFERENCE_SAMPLES,
};
pub use shrink::{eigen_indices_in, soft_threshold, LocLetShrinkage, ParsevalShrinkage, Side};

use crate::calculus::{ChebyshevCalculus, SpectralCalculus};
use crate::chebyshev::Damping;
use crate::frames::{parseval_filters, FrameSpec};
use crate::graph::{dense_eigendecomposition, EigenSystem, LaplacianOperator};
use crate::spectrum::Partition;
use crate::{Error, Result, Scalar};

/// Default Chebyshev degree for statistics and denoising.
pub const DEFAULT_DEGREE: usize = 200;
/// Default significance level of the support test.
pub const DEFAULT_ALPHA: f64 = 1e-3;
/// Dilation base of the Parseval filters used by the denoisers.
pub const FRAME_BASE: f64 = 2.0;

const PF_CAP_HINT: &str = "; use denoise_llet, which needs no eigendecomposition";

/// Where the noise level used by the support test comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SigmaSource<T> {
    Known(T),
    #[default]
    Median,
    /// Trimmed mean with trim parameter `r`.
    Mean(usize),
}

impl<T: Scalar> SigmaSource<T> {
    pub fn resolve(&self, stats: &BlockStats<T>) -> Result<T> {
        match *self {
            SigmaSource::Known(s) => Ok(s),
            SigmaSource::Median => sigma_med(stats),
            SigmaSource::Mean(r) => sigma_mean(stats, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseConfig<T> {
    pub alpha: T,
    /// Partition with interval counts attached.
    pub partition: Partition<T>,
    /// Threshold on the detected support.
    pub t_support: T,
    /// Threshold off the detected support.
    pub t_complement: T,
    pub sigma: SigmaSource<T>,
    pub degree: usize,
    pub seed: u64,
}

impl<T: Scalar> DenoiseConfig<T> {
    /// Defaults: `alpha = 0.001`, no shrinkage, median noise estimate,
    /// degree 200.
    pub fn new(partition: Partition<T>) -> Self {
        Self {
            alpha: T::lit(DEFAULT_ALPHA),
            partition,
            t_support: T::zero(),
            t_complement: T::zero(),
            sigma: SigmaSource::Median,
            degree: DEFAULT_DEGREE,
            seed: 0,
        }
    }

    pub fn with_thresholds(mut self, t_support: T, t_complement: T) -> Self {
        self.t_support = t_support;
        self.t_complement = t_complement;
        self
    }

    pub fn with_sigma(mut self, sigma: SigmaSource<T>) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.t_support >= T::zero() && self.t_complement >= T::zero()) {
            return Err(Error::InvalidParameter("thresholds must be nonnegative".into()));
        }
        if let SigmaSource::Known(s) = self.sigma {
            if !(s > T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "noise level must be positive, got {s}"
                )));
            }
        }
        if self.degree == 0 {
            return Err(Error::InvalidParameter("Chebyshev degree must be positive".into()));
        }
        self.partition.require_counts()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// The noisy signal itself.
    Noisy,
    Pf,
    LLet,
    LLetPf,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Noisy => "SNR_in",
            Method::Pf => "PF",
            Method::LLet => "LLet",
            Method::LLetPf => "LLet+PF",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseResult<T> {
    pub estimate: Vec<T>,
    pub method: Method,
    /// Support test outcome; absent for the full-spectrum PF baseline.
    pub support: Option<SupportEstimate<T>>,
    /// Noise level used by the support test.
    pub sigma: Option<T>,
}

impl<T: Scalar> DenoiseResult<T> {
    pub fn support_size(&self) -> usize {
        self.support.as_ref().map_or(0, |s| s.selected.len())
    }

    pub fn snr_out(&self, clean: &[T]) -> Result<T> {
        snr_db(clean, &self.estimate)
    }
}

/// `10 log10(||f||^2 / ||estimate - f||^2)`
pub fn snr_db<T: Scalar>(clean: &[T], estimate: &[T]) -> Result<T> {
    if clean.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: clean.len(),
            actual: estimate.len(),
        });
    }
    let signal: T = clean.iter().map(|&x| x * x).sum();
    let error: T = clean.iter().zip(estimate).map(|(&a, &b)| (b - a) * (b - a)).sum();
    Ok(T::lit(10.0) * (signal / error).log10())
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo) || count == 0 {
        return Err(Error::InvalidParameter(
            "log grid needs 0 < lo <= hi and count >= 1".into(),
        ));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / T::from_usize_lossy(count - 1);
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                (a + step * T::from_usize_lossy(i)).exp()
            }
        })
        .collect())
}

/// Benchmark threshold grid: 20 log-spaced values over `[1e-3 sigma, 10 sigma]`.
pub fn threshold_grid<T: Scalar>(sigma: T) -> Result<Vec<T>> {
    log_grid(T::lit(1e-3) * sigma, T::lit(10.0) * sigma, 20)
}

/// Parseval filters of the denoisers for a spectrum bounded by `lambda_max`.
pub fn denoising_frame<T: Scalar>(lambda_max: T) -> Result<FrameSpec<T>> {
    parseval_filters(lambda_max, T::lit(FRAME_BASE))
}

/// Dense eigenpairs for the Parseval-frame stage; a cap overflow points the
/// caller at the eigendecomposition-free denoiser.
pub fn parseval_oracle<T: Scalar>(op: &LaplacianOperator<T>, cap: usize) -> Result<EigenSystem<T>> {
    dense_eigendecomposition(op, cap).map_err(|e| match e {
        Error::CapExceeded { n, cap, .. } => Error::CapExceeded {
            n,
            cap,
            hint: PF_CAP_HINT,
        },
        other => other,
    })
}

/// Support test on a noisy signal, with the noise level resolved from the
/// configuration.
pub fn detect_support<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    f: &[T],
    config: &DenoiseConfig<T>,
) -> Result<(SupportEstimate<T>, T)> {
    config.validate()?;
    let stats = interval_statistics(calc, &config.partition, f)?;
    let sigma = config.sigma.resolve(&stats)?;
    Ok((support_from_statistics(&stats, sigma, config.alpha)?, sigma))
}

/// LocLet thresholding with a caller-chosen backend.
pub fn denoise_llet_with<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    f: &[T],
    config: &DenoiseConfig<T>,
) -> Result<DenoiseResult<T>> {
    let (support, sigma) = detect_support(calc, f, config)?;
    let frame = denoising_frame(calc.lambda_max())?;
    let shrinkage = LocLetShrinkage::new(calc, frame, &config.partition, &support, f)?;
    let estimate = shrinkage.reconstruct(config.t_support, config.t_complement)?;
    Ok(DenoiseResult {
        estimate,
        method: Method::LLet,
        support: Some(support),
        sigma: Some(sigma),
    })
}

/// Splits the intervals with the chi-square support test, soft-thresholds
/// the LocLet coefficients of each side with its own level and sums the
/// two reconstructions. Filters are Jackson-damped expansions of degree
/// `config.degree`.
pub fn denoise_llet<T: Scalar>(
    op: &LaplacianOperator<T>,
    f: &[T],
    config: &DenoiseConfig<T>,
) -> Result<DenoiseResult<T>> {
    let calc = ChebyshevCalculus::new(op, config.degree, Damping::Jackson)?;
    denoise_llet_with(&calc, f, config)
}

/// [`denoise_llet_pf`] with a precomputed eigendecomposition of the same
/// Laplacian and a caller-chosen backend for the statistics and the
/// off-support LocLets.
pub fn denoise_llet_pf_with<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    eig: &EigenSystem<T>,
    f: &[T],
    config: &DenoiseConfig<T>,
) -> Result<DenoiseResult<T>> {
    if eig.n() != calc.n() {
        return Err(Error::DimensionMismatch {
            expected: calc.n(),
            actual: eig.n(),
        });
    }
    let (support, sigma) = detect_support(calc, f, config)?;
    let frame = denoising_frame(calc.lambda_max())?;
    let indices = eigen_indices_in(eig, &config.partition, &support.selected);
    let pf = ParsevalShrinkage::new(eig, &frame, indices, f)?;
    let mut estimate = pf.reconstruct(config.t_support)?;
    let off = LocLetShrinkage::new(calc, frame, &config.partition, &support, f)?;
    let rest = off.reconstruct_side(Side::Complement, config.t_complement)?;
    estimate.iter_mut().zip(&rest).for_each(|(e, &r)| *e += r);
    Ok(DenoiseResult {
        estimate,
        method: Method::LLetPf,
        support: Some(support),
        sigma: Some(sigma),
    })
}

/// Parseval-frame thresholding (level `t_support`) on the eigenpairs of the
/// detected support plus LocLet thresholding (level `t_complement`) off it.
///
/// Needs a dense eigendecomposition, refused above `cap` vertices.
pub fn denoise_llet_pf<T: Scalar>(
    op: &LaplacianOperator<T>,
    f: &[T],
    config: &DenoiseConfig<T>,
    cap: usize,
) -> Result<DenoiseResult<T>> {
    let eig = parseval_oracle(op, cap)?;
    let calc = ChebyshevCalculus::new(op, config.degree, Damping::Jackson)?;
    denoise_llet_pf_with(&calc, &eig, f, config)
}

/// Full-spectrum Parseval-frame thresholding.
pub fn denoise_pf<T: Scalar>(eig: &EigenSystem<T>, f: &[T], t: T) -> Result<DenoiseResult<T>> {
    let frame = denoising_frame(eig.lambda_1().max(T::lit(crate::graph::LAMBDA_FLOOR)))?;
    let pf = ParsevalShrinkage::new(eig, &frame, (0..eig.n()).collect(), f)?;
    Ok(DenoiseResult {
        estimate: pf.reconstruct(t)?,
        method: Method::Pf,
        support: None,
        sigma: None,
    })
}
