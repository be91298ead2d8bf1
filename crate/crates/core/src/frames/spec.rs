use crate::{Error, Result, Scalar};

/// Dyadic-style Parseval frame built from a piecewise-linear cut-off.
///
/// `omega` is 1 on `(-inf, 1/b]`, 0 on `[1, inf)` and linear in between.
/// The scaling response is `zeta_0 = omega`, the kernel response is
/// `zeta_1(x) = omega(x / b) - omega(x)`, and band `j >= 1` uses the scale
/// `s_j = b^(1 - j)`. The squared responses of bands `0..=J` sum to one on
/// `[0, lambda_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSpec<T> {
    base: T,
    scales: usize,
    lambda_max: T,
}

/// Parseval filters for spectra inside `[0, lambda_max]`.
pub fn parseval_filters<T: Scalar>(lambda_max: T, base: T) -> Result<FrameSpec<T>> {
    if !(lambda_max > T::zero()) || !lambda_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    if !(base > T::one()) || !base.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dilation base must exceed 1, got {base}"
        )));
    }
    let ratio = (lambda_max.ln() / base.ln()).to_f64_lossy();
    // the nudge keeps exact powers of the base from rounding down
    let scales = ((ratio + 1e-12).floor() + 2.0).max(1.0) as usize;
    Ok(FrameSpec {
        base,
        scales,
        lambda_max,
    })
}

impl<T: Scalar> FrameSpec<T> {
    pub fn base(&self) -> T {
        self.base
    }

    /// Number of kernel scales `J`.
    pub fn scale_count(&self) -> usize {
        self.scales
    }

    /// Scaling band plus `J` kernel bands.
    pub fn band_count(&self) -> usize {
        self.scales + 1
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    /// `s_j = b^(1 - j)` for `j >= 1`.
    pub fn scale(&self, j: usize) -> T {
        self.base.powi(1 - j as i32)
    }

    pub fn omega(&self, x: T) -> T {
        let knee = self.base.recip();
        if x <= knee {
            T::one()
        } else if x >= T::one() {
            T::zero()
        } else {
            (T::one() - x) / (T::one() - knee)
        }
    }

    pub fn zeta0(&self, lambda: T) -> T {
        self.omega(lambda)
    }

    pub fn zeta1(&self, x: T) -> T {
        (self.omega(x / self.base) - self.omega(x)).max(T::zero())
    }

    /// Squared response of band `j` (0 is the scaling band).
    pub fn band_energy(&self, j: usize, lambda: T) -> T {
        if j == 0 {
            self.zeta0(lambda)
        } else {
            self.zeta1(self.scale(j) * lambda)
        }
    }

    /// `phi = sqrt(zeta_0)` for band 0, `psi(s_j .) = sqrt(zeta_1(s_j .))` otherwise.
    pub fn band_response(&self, j: usize, lambda: T) -> T {
        self.band_energy(j, lambda).sqrt()
    }

    /// `|sum_j band_energy(j, lambda) - 1|`
    pub fn unity_residual(&self, lambda: T) -> T {
        let total: T = (0..self.band_count()).map(|j| self.band_energy(j, lambda)).sum();
        (total - T::one()).abs()
    }
}
