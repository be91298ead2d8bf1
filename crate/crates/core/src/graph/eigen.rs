//! Dense symmetric eigendecomposition, used as a verification oracle and for
//! the low-rank Parseval frame at desk scale.

use faer::{Mat, Side};

use super::LaplacianOperator;
use crate::scalar::{axpy, dot};
use crate::{Error, Result, Scalar};

/// Largest vertex count accepted by [`dense_eigendecomposition`] by default.
pub const DEFAULT_DENSE_CAP: usize = 4000;

/// Eigenpairs of a Laplacian with eigenvalues in decreasing order
/// (`lambda_1 >= ... >= lambda_n`).
#[derive(Debug, Clone)]
pub struct EigenSystem<T> {
    n: usize,
    values: Vec<T>,
    // eigenvector l occupies vectors[l * n .. (l + 1) * n]
    vectors: Vec<T>,
}

pub fn dense_eigendecomposition<T: Scalar>(op: &LaplacianOperator<T>, cap: usize) -> Result<EigenSystem<T>> {
    let n = op.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap, hint: "" });
    }
    let dense = op.to_dense();
    let mat = Mat::<f64>::from_fn(n, n, |i, j| dense[i * n + j].to_f64_lossy());
    let evd = mat.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    // faer returns ascending order; L is positive semidefinite, so negative
    // values are round-off and would fall outside every spectral interval
    for col in (0..n).rev() {
        values.push(T::lit(s.read(col).max(0.0)));
        let mut v: Vec<f64> = (0..n).map(|row| u.read(row, col)).collect();
        canonical_sign(&mut v);
        vectors.extend(v.into_iter().map(T::lit));
    }
    Ok(EigenSystem { n, values, vectors })
}

/// Fixes the sign ambiguity: the entry of largest magnitude (first one on
/// ties) is made positive.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

impl<T: Scalar> EigenSystem<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Eigenvector paired with `values()[l]` (0-based, decreasing order).
    pub fn vector(&self, l: usize) -> &[T] {
        &self.vectors[l * self.n..(l + 1) * self.n]
    }

    pub fn lambda_1(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    /// Graph Fourier coefficients `<f, chi_l>`.
    pub fn gft(&self, f: &[T]) -> Result<Vec<T>> {
        self.check(f.len())?;
        Ok((0..self.n).map(|l| dot(self.vector(l), f)).collect())
    }

    /// `sum_l c_l chi_l`
    pub fn inverse_gft(&self, coeffs: &[T]) -> Result<Vec<T>> {
        self.check(coeffs.len())?;
        let mut out = vec![T::zero(); self.n];
        for (l, &c) in coeffs.iter().enumerate() {
            if c != T::zero() {
                axpy(c, self.vector(l), &mut out);
            }
        }
        Ok(out)
    }

    /// Exact functional calculus `g(L) f`.
    pub fn apply<F: Fn(T) -> T>(&self, g: F, f: &[T]) -> Result<Vec<T>> {
        let mut coeffs = self.gft(f)?;
        for (c, &lambda) in coeffs.iter_mut().zip(&self.values) {
            *c *= g(lambda);
        }
        self.inverse_gft(&coeffs)
    }

    /// Projection onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn project<F: Fn(T) -> bool>(&self, keep: F, f: &[T]) -> Result<Vec<T>> {
        self.apply(|lambda| if keep(lambda) { T::one() } else { T::zero() }, f)
    }

    /// Projection onto the eigenvectors with the given (0-based) indices.
    pub fn project_indices(&self, indices: &[usize], f: &[T]) -> Result<Vec<T>> {
        self.check(f.len())?;
        let mut out = vec![T::zero(); self.n];
        for &l in indices {
            let c = dot(self.vector(l), f);
            axpy(c, self.vector(l), &mut out);
        }
        Ok(out)
    }

    /// Number of eigenvalues satisfying `pred`.
    pub fn count<F: Fn(T) -> bool>(&self, pred: F) -> usize {
        self.values.iter().filter(|&&v| pred(v)).count()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }
}
