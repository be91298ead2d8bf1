use crate::graph::{dense_eigendecomposition, EigenSystem, LaplacianOperator};
use crate::{Error, Result, Scalar};

/// Cosine kernel of a spectrum-adapted tight frame.
///
/// `g(y) = sum_i a_i cos(2 pi i (y / (R w) + 1/2))` on `[-R w, 0]` and zero
/// elsewhere, with band spacing `w = gamma / (J + 1 + R)`. The warping is
/// `log(C omega_0(lambda))` with `C = e^gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedKernel<T> {
    coeffs: Vec<T>,
    gamma: T,
    scales: usize,
    overlap: usize,
}

impl<T: Scalar> WarpedKernel<T> {
    /// Requires `2 <= R <= J` and `sum_i (-1)^i a_i = 0`.
    pub fn new(coeffs: Vec<T>, gamma: T, scales: usize, overlap: usize) -> Result<Self> {
        if overlap < 2 || overlap > scales {
            return Err(Error::InvalidParameter(format!(
                "overlap R = {overlap} must satisfy 2 <= R <= J = {scales}"
            )));
        }
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter("gamma must be positive".into()));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("kernel needs at least one coefficient".into()));
        }
        let alternating = coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &a)| if i % 2 == 0 { acc + a } else { acc - a });
        let scale: T = coeffs.iter().map(|a| a.abs()).sum();
        if alternating.abs() > T::lit(1e-12) * scale.max(T::one()) {
            return Err(Error::InvalidParameter(format!(
                "kernel coefficients must have vanishing alternating sum, got {alternating}"
            )));
        }
        Ok(Self {
            coeffs,
            gamma,
            scales,
            overlap,
        })
    }

    /// `w = gamma / (J + 1 + R)`
    pub fn spacing(&self) -> T {
        self.gamma / T::from_usize_lossy(self.scales + 1 + self.overlap)
    }

    /// Normalisation `C = e^gamma` of the warping.
    pub fn normalisation(&self) -> T {
        self.gamma.exp()
    }

    pub fn kernel(&self, y: T) -> T {
        let width = T::from_usize_lossy(self.overlap) * self.spacing();
        if !(y >= -width && y <= T::zero()) {
            return T::zero();
        }
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let phase = y / width + T::lit(0.5);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a * (two_pi * T::from_usize_lossy(i) * phase).cos())
            .sum()
    }

    /// Translated band `g_j(lambda) = g(log(C omega_0(lambda)) - j w)`.
    pub fn band(&self, j: usize, warped: T) -> T {
        if !(warped > T::zero()) {
            return T::zero();
        }
        self.kernel((self.normalisation() * warped).ln() - T::from_usize_lossy(j) * self.spacing())
    }

    /// Warped LocLet profile `psi(x) = g(log(C x))`.
    pub fn profile(&self, x: T) -> T {
        if !(x > T::zero()) {
            return T::zero();
        }
        self.kernel((self.normalisation() * x).ln())
    }

    /// Interval `k` of the warped axis:
    /// `[e^((k - R) w) / C, e^((k - R + 1) w) / C)`, the last one closed.
    pub fn contains(&self, k: usize, x: T) -> bool {
        let w = self.spacing();
        let c = self.normalisation();
        let shift = |m: i64| (T::lit(m as f64) * w).exp() / c;
        let (lo, hi) = (
            shift(k as i64 - self.overlap as i64),
            shift(k as i64 - self.overlap as i64 + 1),
        );
        x >= lo && (x < hi || (k + 1 == self.overlap && x <= hi))
    }
}

/// Largest entrywise gap, over bands `j = 1..=J` and vertices `m`, between
/// the spectrum-adapted frame vectors `g_{m,j}` and the sum over `k` of the
/// warped LocLets `psi_{j,m,I_k}`, both evaluated on the eigendecomposition.
pub fn warped_identity_deviation<T: Scalar, W: Fn(T) -> T>(
    eig: &EigenSystem<T>,
    kernel: &WarpedKernel<T>,
    omega0: W,
) -> T {
    let n = eig.n();
    let warped: Vec<T> = eig.values().iter().map(|&l| omega0(l)).collect();
    let mut worst = T::zero();
    for j in 1..=kernel.scales {
        let s = (-T::from_usize_lossy(j) * kernel.spacing()).exp();
        let left: Vec<T> = warped.iter().map(|&w| kernel.band(j, w)).collect();
        let right: Vec<T> = warped
            .iter()
            .map(|&w| {
                let x = s * w;
                (0..kernel.overlap)
                    .filter(|&k| kernel.contains(k, x))
                    .map(|_| kernel.profile(x))
                    .sum()
            })
            .collect();
        // g_{m,j} = sum_l g_j(lambda_l) chi_l(m) chi_l, one column per vertex m
        let column = |resp: &[T], m: usize| -> Vec<T> {
            let mut out = vec![T::zero(); n];
            for (l, &r) in resp.iter().enumerate() {
                if r == T::zero() {
                    continue;
                }
                let chi = eig.vector(l);
                let w = r * chi[m];
                out.iter_mut().zip(chi).for_each(|(o, &c)| *o += w * c);
            }
            out
        };
        for m in 0..n {
            let a = column(&left, m);
            let b = column(&right, m);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((*x - *y).abs());
            }
        }
    }
    worst
}

/// [`warped_identity_deviation`] on the dense eigendecomposition of `op`,
/// refused above `cap` vertices.
pub fn warped_frame_identity_check<T: Scalar, W: Fn(T) -> T>(
    op: &LaplacianOperator<T>,
    kernel: &WarpedKernel<T>,
    omega0: W,
    cap: usize,
) -> Result<T> {
    let eig = dense_eigendecomposition(op, cap)?;
    Ok(warped_identity_deviation(&eig, kernel, omega0))
}
