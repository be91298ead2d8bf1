//! Truncated Chebyshev expansions of spectral filters on `[0, lambda_max]`.
//!
//! A filter `g` is represented through `g~(x) = g(lambda_max (x + 1) / 2)` on
//! `[-1, 1]`, so that `g(L) f ~ sum_i a_i T_i(L~) f` with
//! `L~ = (2 / lambda_max) L - I`. Applying a [`FilterBank`] runs the
//! three-term recurrence once and accumulates every filter from the shared
//! basis vectors `T_i(L~) f`.

use rayon::prelude::*;

use crate::graph::LaplacianOperator;
use crate::scalar::{axpy, dot};
use crate::{Error, Result, Scalar};

/// Below this many filters the per-filter accumulation stays sequential.
const PARALLEL_BANK_MIN: usize = 8;

/// Coefficient multipliers applied after quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Damping {
    #[default]
    None,
    /// Jackson kernel; suppresses Gibbs oscillations of discontinuous filters.
    Jackson,
}

/// Spectral interval `[lo, hi)`, or `[lo, hi]` when `closed_hi` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub closed_hi: bool,
}

impl<T: Scalar> Interval<T> {
    pub fn half_open(lo: T, hi: T) -> Self {
        Self {
            lo,
            hi,
            closed_hi: false,
        }
    }

    pub fn closed(lo: T, hi: T) -> Self {
        Self {
            lo,
            hi,
            closed_hi: true,
        }
    }

    pub fn contains(&self, lambda: T) -> bool {
        lambda >= self.lo && (lambda < self.hi || (self.closed_hi && lambda <= self.hi))
    }

    pub fn indicator(&self, lambda: T) -> T {
        if self.contains(lambda) {
            T::one()
        } else {
            T::zero()
        }
    }
}

/// Jackson damping factors `g_0 .. g_N` for an expansion of degree `N`.
pub fn jackson_multipliers<T: Scalar>(degree: usize) -> Vec<T> {
    let np1 = (degree + 1) as f64;
    let alpha = std::f64::consts::PI / np1;
    let cot = alpha.cos() / alpha.sin();
    (0..=degree)
        .map(|i| {
            let i = i as f64;
            T::lit(((np1 - i) * (alpha * i).cos() + (alpha * i).sin() * cot) / np1)
        })
        .collect()
}

/// Cosine-node quadrature shared by every filter of a given degree.
///
/// Uses `M = 2 (N + 1)` nodes `theta_m = pi (m + 1/2) / M`.
#[derive(Debug, Clone)]
pub struct ChebyshevQuadrature<T> {
    degree: usize,
    thetas: Vec<T>,
    // cos(i * theta_m), row m, column i
    cosines: Vec<T>,
    jackson: Vec<T>,
}

impl<T: Scalar> ChebyshevQuadrature<T> {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter("Chebyshev degree must be at least 1".into()));
        }
        let m = 2 * (degree + 1);
        let thetas: Vec<f64> = (0..m)
            .map(|k| std::f64::consts::PI * (k as f64 + 0.5) / m as f64)
            .collect();
        let mut cosines = Vec::with_capacity(m * (degree + 1));
        for &theta in &thetas {
            for i in 0..=degree {
                cosines.push(T::lit((i as f64 * theta).cos()));
            }
        }
        Ok(Self {
            degree,
            thetas: thetas.into_iter().map(T::lit).collect(),
            cosines,
            jackson: jackson_multipliers(degree),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn node_count(&self) -> usize {
        self.thetas.len()
    }

    /// Spectral position of quadrature node `m` on `[0, lambda_max]`.
    pub fn node(&self, m: usize, lambda_max: T) -> T {
        lambda_max * (self.thetas[m].cos() + T::one()) / T::lit(2.0)
    }

    pub fn coefficients<F: Fn(T) -> T>(&self, g: F, lambda_max: T, damping: Damping) -> Result<ChebyshevFilter<T>> {
        if !(lambda_max > T::zero()) || !lambda_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda_max must be positive, got {lambda_max}"
            )));
        }
        let np1 = self.degree + 1;
        let m_count = self.node_count();
        let mut coeffs = vec![T::zero(); np1];
        for m in 0..m_count {
            let lambda = self.node(m, lambda_max);
            let value = g(lambda);
            if !value.is_finite() {
                return Err(Error::NonFiniteFilter {
                    node: m,
                    lambda: lambda.to_f64_lossy(),
                });
            }
            if value == T::zero() {
                continue;
            }
            let row = &self.cosines[m * np1..(m + 1) * np1];
            for (c, &cos) in coeffs.iter_mut().zip(row) {
                *c += value * cos;
            }
        }
        let scale = T::lit(2.0) / T::from_usize_lossy(m_count);
        coeffs.iter_mut().for_each(|c| *c *= scale);
        coeffs[0] /= T::lit(2.0);
        if damping == Damping::Jackson {
            for (c, &g) in coeffs.iter_mut().zip(&self.jackson) {
                *c *= g;
            }
        }
        Ok(ChebyshevFilter {
            coeffs,
            lambda_max,
            damping,
        })
    }
}

/// Truncated Chebyshev expansion `sum_{i <= N} a_i T_i` of a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFilter<T> {
    coeffs: Vec<T>,
    lambda_max: T,
    damping: Damping,
}

impl<T: Scalar> ChebyshevFilter<T> {
    /// Builds a filter from explicit coefficients `a_0 .. a_N` (`N >= 1`).
    pub fn from_coefficients(coeffs: Vec<T>, lambda_max: T, damping: Damping) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter("need at least a_0 and a_1".into()));
        }
        if !(lambda_max > T::zero()) {
            return Err(Error::InvalidParameter("lambda_max must be positive".into()));
        }
        Ok(Self {
            coeffs,
            lambda_max,
            damping,
        })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    pub fn damping(&self) -> Damping {
        self.damping
    }

    /// Evaluates the expansion at `lambda` (Clenshaw).
    pub fn evaluate(&self, lambda: T) -> T {
        let two = T::lit(2.0);
        let x = two * lambda / self.lambda_max - T::one();
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &a in self.coeffs.iter().skip(1).rev() {
            let b0 = a + two * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    /// Coefficient-wise sum of filters sharing degree and domain.
    pub fn sum<'a, I: IntoIterator<Item = &'a Self>>(filters: I) -> Result<Self>
    where
        T: 'a,
    {
        let mut iter = filters.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidParameter("cannot sum an empty set of filters".into()))?;
        let mut out = first.clone();
        for f in iter {
            if f.degree() != out.degree() || f.lambda_max != out.lambda_max {
                return Err(Error::InvalidParameter("filters differ in degree or domain".into()));
            }
            for (a, &b) in out.coeffs.iter_mut().zip(&f.coeffs) {
                *a += b;
            }
        }
        Ok(out)
    }
}

/// Computes the degree-`N` expansion of `g` on `[0, lambda_max]`.
pub fn chebyshev_coefficients<T: Scalar, F: Fn(T) -> T>(
    g: F,
    degree: usize,
    lambda_max: T,
    damping: Damping,
) -> Result<ChebyshevFilter<T>> {
    ChebyshevQuadrature::new(degree)?.coefficients(g, lambda_max, damping)
}

/// Jackson-damped expansion of the indicator of `interval`.
pub fn projector_filter<T: Scalar>(interval: Interval<T>, degree: usize, lambda_max: T) -> Result<ChebyshevFilter<T>> {
    if !(interval.lo < interval.hi) {
        return Err(Error::InvalidParameter(format!(
            "empty interval [{}, {})",
            interval.lo, interval.hi
        )));
    }
    chebyshev_coefficients(|l| interval.indicator(l), degree, lambda_max, Damping::Jackson)
}

/// Filters sharing one degree and one spectral domain.
#[derive(Debug, Clone)]
pub struct FilterBank<T> {
    filters: Vec<ChebyshevFilter<T>>,
}

impl<T: Scalar> FilterBank<T> {
    pub fn new(filters: Vec<ChebyshevFilter<T>>) -> Result<Self> {
        let first = filters
            .first()
            .ok_or_else(|| Error::InvalidParameter("filter bank is empty".into()))?;
        let (degree, lambda_max) = (first.degree(), first.lambda_max());
        if filters
            .iter()
            .any(|f| f.degree() != degree || f.lambda_max() != lambda_max)
        {
            return Err(Error::InvalidParameter(
                "filters in a bank must share degree and lambda_max".into(),
            ));
        }
        Ok(Self { filters })
    }

    pub fn filters(&self) -> &[ChebyshevFilter<T>] {
        &self.filters
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.filters[0].degree()
    }

    pub fn lambda_max(&self) -> T {
        self.filters[0].lambda_max()
    }
}

/// `y = L~ x = (2 / lambda_max) L x - x`
fn normalized_matvec<T: Scalar>(op: &LaplacianOperator<T>, scale: T, x: &[T], y: &mut [T]) {
    op.matvec_into(x, y);
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = scale * *yi - xi;
    }
}

fn check_domain<T: Scalar>(op: &LaplacianOperator<T>, lambda_max: T) -> Result<()> {
    if lambda_max < op.lambda_max() {
        return Err(Error::InvalidParameter(format!(
            "filter domain [0, {lambda_max}] does not cover the spectral bound {}",
            op.lambda_max()
        )));
    }
    Ok(())
}

/// Visits the basis vectors `T_i(L~) f` for `i = 0..=degree` in order.
pub fn chebyshev_sweep<T: Scalar, V: FnMut(usize, &[T])>(
    op: &LaplacianOperator<T>,
    lambda_max: T,
    degree: usize,
    f: &[T],
    mut visit: V,
) -> Result<()> {
    op.check_len(f.len())?;
    let n = op.n();
    let scale = T::lit(2.0) / lambda_max;
    let mut prev = f.to_vec();
    visit(0, &prev);
    if degree == 0 {
        return Ok(());
    }
    let mut cur = vec![T::zero(); n];
    normalized_matvec(op, scale, &prev, &mut cur);
    visit(1, &cur);
    let mut next = vec![T::zero(); n];
    for i in 2..=degree {
        normalized_matvec(op, scale, &cur, &mut next);
        for (nx, &pv) in next.iter_mut().zip(&prev) {
            *nx = T::lit(2.0) * *nx - pv;
        }
        visit(i, &next);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(())
}

/// `g_N(L) f` for a single filter.
pub fn apply_filter<T: Scalar>(op: &LaplacianOperator<T>, filter: &ChebyshevFilter<T>, f: &[T]) -> Result<Vec<T>> {
    let bank = FilterBank::new(vec![filter.clone()])?;
    Ok(apply_filter_bank(op, &bank, f)?.pop().expect("one output per filter"))
}

/// `g_{k,N}(L) f` for every filter of the bank from a single basis sweep.
pub fn apply_filter_bank<T: Scalar>(op: &LaplacianOperator<T>, bank: &FilterBank<T>, f: &[T]) -> Result<Vec<Vec<T>>> {
    check_domain(op, bank.lambda_max())?;
    let n = op.n();
    let mut outputs = vec![vec![T::zero(); n]; bank.len()];
    let parallel = bank.len() >= PARALLEL_BANK_MIN;
    chebyshev_sweep(op, bank.lambda_max(), bank.degree(), f, |i, basis| {
        let step = |(out, filter): (&mut Vec<T>, &ChebyshevFilter<T>)| {
            let a = filter.coeffs[i];
            if i == 0 {
                for (o, &b) in out.iter_mut().zip(basis) {
                    *o = a * b;
                }
            } else {
                axpy(a, basis, out);
            }
        };
        if parallel {
            outputs.par_iter_mut().zip(bank.filters.par_iter()).for_each(step);
        } else {
            outputs.iter_mut().zip(bank.filters.iter()).for_each(step);
        }
    })?;
    Ok(outputs)
}

/// `sum_k g_{k,N}(L) eta_k`, the adjoint of [`apply_filter_bank`].
///
/// Runs a vector Clenshaw recurrence, so the cost is `N` matrix-vector
/// products regardless of the number of filters.
pub fn synthesize_filter_bank<T: Scalar>(
    op: &LaplacianOperator<T>,
    bank: &FilterBank<T>,
    inputs: &[&[T]],
) -> Result<Vec<T>> {
    check_domain(op, bank.lambda_max())?;
    if inputs.len() != bank.len() {
        return Err(Error::DimensionMismatch {
            expected: bank.len(),
            actual: inputs.len(),
        });
    }
    for eta in inputs {
        op.check_len(eta.len())?;
    }
    let n = op.n();
    let active: Vec<usize> = (0..inputs.len())
        .filter(|&k| inputs[k].iter().any(|&x| x != T::zero()))
        .collect();
    match active.as_slice() {
        [] => return Ok(vec![T::zero(); n]),
        // a lone active input is a plain filter application
        &[k] => return apply_filter(op, &bank.filters[k], inputs[k]),
        _ => {}
    }
    let degree = bank.degree();
    let scale = T::lit(2.0) / bank.lambda_max();
    let two = T::lit(2.0);

    let combined = |i: usize| -> Vec<T> {
        let mut v = vec![T::zero(); n];
        for &k in &active {
            let a = bank.filters[k].coeffs[i];
            if a != T::zero() {
                axpy(a, inputs[k], &mut v);
            }
        }
        v
    };

    // b_i = v_i + 2 L~ b_{i+1} - b_{i+2};  y = v_0 + L~ b_1 - b_2
    let mut b1 = vec![T::zero(); n];
    let mut b2 = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    for i in (1..=degree).rev() {
        normalized_matvec(op, scale, &b1, &mut tmp);
        let v = combined(i);
        for k in 0..n {
            tmp[k] = v[k] + two * tmp[k] - b2[k];
        }
        std::mem::swap(&mut b2, &mut b1);
        std::mem::swap(&mut b1, &mut tmp);
    }
    normalized_matvec(op, scale, &b1, &mut tmp);
    let v0 = combined(0);
    Ok((0..n).map(|k| v0[k] + tmp[k] - b2[k]).collect())
}

/// Chebyshev moments `<f, T_i(L~) f>` for `i = 0..=degree`.
pub fn chebyshev_moments<T: Scalar>(
    op: &LaplacianOperator<T>,
    lambda_max: T,
    degree: usize,
    f: &[T],
) -> Result<Vec<T>> {
    let mut moments = Vec::with_capacity(degree + 1);
    chebyshev_sweep(op, lambda_max, degree, f, |_, basis| moments.push(dot(f, basis)))?;
    Ok(moments)
}

/// `sum_i a_i m_i`: the quadratic form `<f, g_N(L) f>` from precomputed moments.
pub fn quadratic_form_from_moments<T: Scalar>(filter: &ChebyshevFilter<T>, moments: &[T]) -> T {
    filter
        .coeffs
        .iter()
        .zip(moments)
        .fold(T::zero(), |acc, (&a, &m)| acc + a * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian, WeightedGraph};

    fn path(n: usize) -> LaplacianOperator<f64> {
        laplacian(&WeightedGraph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0 + (i % 3) as f64))).unwrap())
    }

    #[test]
    fn constant_filter_coefficients() {
        for degree in [1, 5, 40] {
            let f = chebyshev_coefficients(|_| 1.0f64, degree, 3.0, Damping::None).unwrap();
            assert!((f.coeffs()[0] - 1.0).abs() < 1e-14);
            assert!(f.coeffs()[1..].iter().all(|a| a.abs() < 1e-14));
        }
    }

    #[test]
    fn affine_filter_is_exact_at_degree_one() {
        let f = chebyshev_coefficients(|l: f64| l, 1, 2.0, Damping::None).unwrap();
        for k in 0..=20 {
            let l = 2.0 * k as f64 / 20.0;
            assert!((f.evaluate(l) - l).abs() < 1e-14);
        }
    }

    #[test]
    fn exponential_expansion_error() {
        // direct evaluation of the truncated series vs the function itself
        let f = chebyshev_coefficients(|l: f64| (-l).exp(), 30, 4.0, Damping::None).unwrap();
        let worst = (0..1000)
            .map(|k| 4.0 * k as f64 / 999.0)
            .map(|l| (f.evaluate(l) - (-l).exp()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn non_finite_filter_names_the_node() {
        let err = chebyshev_coefficients(|l: f64| 1.0 / (l - l), 3, 1.0, Damping::None);
        assert!(matches!(err, Err(Error::NonFiniteFilter { node: 0, .. })));
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(chebyshev_coefficients(|_| 1.0f64, 0, 1.0, Damping::None).is_err());
    }

    #[test]
    fn jackson_multipliers_start_at_one_and_decay() {
        let g: Vec<f64> = jackson_multipliers(50);
        assert!((g[0] - 1.0).abs() < 1e-14);
        assert!(g.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        assert!(g[50].abs() < 1e-12 && g[49] > 0.0);
    }

    #[test]
    fn identity_and_linear_filters_on_a_graph() {
        let op = path(30);
        let f: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin()).collect();
        let id = chebyshev_coefficients(|_| 1.0, 10, op.lambda_max(), Damping::None).unwrap();
        let out = apply_filter(&op, &id, &f).unwrap();
        assert!(out.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-12));

        let lin = chebyshev_coefficients(|l| l, 3, op.lambda_max(), Damping::None).unwrap();
        let out = apply_filter(&op, &lin, &f).unwrap();
        let lf = op.matvec(&f).unwrap();
        assert!(out.iter().zip(&lf).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn bank_matches_individual_application_bitwise() {
        let op = path(25);
        let f: Vec<f64> = (0..25).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let lm = op.lambda_max();
        let filters: Vec<_> = (0..10)
            .map(|k| chebyshev_coefficients(|l| (-(k as f64) * l / lm).exp(), 20, lm, Damping::None).unwrap())
            .collect();
        let bank = FilterBank::new(filters.clone()).unwrap();
        let joint = apply_filter_bank(&op, &bank, &f).unwrap();
        for (filter, out) in filters.iter().zip(&joint) {
            assert_eq!(&apply_filter(&op, filter, &f).unwrap(), out);
        }
    }

    #[test]
    fn bank_rejects_mixed_degrees_and_small_domain() {
        let a = chebyshev_coefficients(|_| 1.0f64, 3, 2.0, Damping::None).unwrap();
        let b = chebyshev_coefficients(|_| 1.0f64, 4, 2.0, Damping::None).unwrap();
        assert!(FilterBank::new(vec![a, b]).is_err());
        assert!(FilterBank::<f64>::new(vec![]).is_err());

        let op = path(10);
        let small = chebyshev_coefficients(|_| 1.0, 3, op.lambda_max() / 2.0, Damping::None).unwrap();
        assert!(apply_filter(&op, &small, &[0.0; 10]).is_err());
    }

    #[test]
    fn synthesis_is_the_adjoint_of_analysis() {
        let op = path(40);
        let lm = op.lambda_max();
        let filters: Vec<_> = (1..5)
            .map(|k| chebyshev_coefficients(|l| (k as f64 * l / lm).sin(), 25, lm, Damping::Jackson).unwrap())
            .collect();
        let bank = FilterBank::new(filters).unwrap();
        let f: Vec<f64> = (0..40).map(|i| (i as f64).cos()).collect();
        let etas: Vec<Vec<f64>> = (0..4)
            .map(|k| (0..40).map(|i| ((i * (k + 2)) as f64 * 0.3).sin()).collect())
            .collect();
        let wf = apply_filter_bank(&op, &bank, &f).unwrap();
        let lhs: f64 = wf.iter().zip(&etas).map(|(a, b)| dot(a, b)).sum();
        let refs: Vec<&[f64]> = etas.iter().map(|v| v.as_slice()).collect();
        let rhs = dot(&f, &synthesize_filter_bank(&op, &bank, &refs).unwrap());
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn moments_reproduce_quadratic_forms() {
        let op = path(20);
        let f: Vec<f64> = (0..20).map(|i| 1.0 + (i as f64).sqrt()).collect();
        let filter = chebyshev_coefficients(|l| 1.0 / (1.0 + l), 15, op.lambda_max(), Damping::None).unwrap();
        let moments = chebyshev_moments(&op, op.lambda_max(), 15, &f).unwrap();
        let direct = dot(&f, &apply_filter(&op, &filter, &f).unwrap());
        assert!((quadratic_form_from_moments(&filter, &moments) - direct).abs() < 1e-10);
    }

    #[test]
    fn half_open_intervals() {
        let i = Interval::half_open(1.0, 2.0);
        assert!(i.contains(1.0) && !i.contains(2.0));
        assert!(Interval::closed(1.0, 2.0).contains(2.0));
        assert!(projector_filter(Interval::half_open(2.0, 2.0), 10, 4.0).is_err());
    }
}
