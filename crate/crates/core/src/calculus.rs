//! Backends that evaluate families of spectral filters `g_k(L)` on signals.
//!
//! [`ChebyshevCalculus`] is the scalable path: every filter of a bank is
//! expanded to the same degree and applied from one basis sweep.
//! [`OracleCalculus`] evaluates the same filters exactly through a dense
//! eigendecomposition and is used to verify the former at desk scale.

use crate::chebyshev::{
    apply_filter_bank, chebyshev_moments, quadratic_form_from_moments, synthesize_filter_bank, ChebyshevQuadrature,
    Damping, FilterBank,
};
use crate::graph::{EigenSystem, LaplacianOperator};
use crate::scalar::axpy;
use crate::{Error, Result, Scalar};

/// Scalar filter on the spectral axis.
pub type ScalarFilter<'a, T> = Box<dyn Fn(T) -> T + Send + Sync + 'a>;

/// Evaluates filter families `g_k(L)` on signals.
pub trait SpectralCalculus<T: Scalar>: Sync {
    /// Filters in the representation the backend applies.
    type Bank;

    fn n(&self) -> usize;

    /// Upper end of the spectral domain the filters are defined on.
    fn lambda_max(&self) -> T;

    /// Polynomial degree of the expansion, `None` for exact evaluation.
    fn expansion_degree(&self) -> Option<usize> {
        None
    }

    fn expansion_damping(&self) -> Damping {
        Damping::None
    }

    fn prepare(&self, filters: &[ScalarFilter<'_, T>]) -> Result<Self::Bank>;

    /// `[g_1(L) f, ..., g_K(L) f]`
    fn analyze(&self, bank: &Self::Bank, f: &[T]) -> Result<Vec<Vec<T>>>;

    /// `sum_k g_k(L) eta_k`
    fn synthesize(&self, bank: &Self::Bank, coeffs: &[&[T]]) -> Result<Vec<T>>;

    /// `[<f, g_1(L) f>, ..., <f, g_K(L) f>]`
    fn quadratic_forms(&self, bank: &Self::Bank, f: &[T]) -> Result<Vec<T>>;
}

/// Truncated Chebyshev backend.
#[derive(Debug, Clone)]
pub struct ChebyshevCalculus<'a, T> {
    op: &'a LaplacianOperator<T>,
    quadrature: ChebyshevQuadrature<T>,
    damping: Damping,
}

impl<'a, T: Scalar> ChebyshevCalculus<'a, T> {
    pub fn new(op: &'a LaplacianOperator<T>, degree: usize, damping: Damping) -> Result<Self> {
        Ok(Self {
            op,
            quadrature: ChebyshevQuadrature::new(degree)?,
            damping,
        })
    }

    pub fn operator(&self) -> &'a LaplacianOperator<T> {
        self.op
    }

    pub fn degree(&self) -> usize {
        self.quadrature.degree()
    }

    pub fn damping(&self) -> Damping {
        self.damping
    }

    /// Same operator and degree with another damping.
    pub fn with_damping(&self, damping: Damping) -> Self {
        Self {
            op: self.op,
            quadrature: self.quadrature.clone(),
            damping,
        }
    }
}

impl<T: Scalar> SpectralCalculus<T> for ChebyshevCalculus<'_, T> {
    type Bank = FilterBank<T>;

    fn n(&self) -> usize {
        self.op.n()
    }

    fn lambda_max(&self) -> T {
        self.op.lambda_max()
    }

    fn expansion_degree(&self) -> Option<usize> {
        Some(self.degree())
    }

    fn expansion_damping(&self) -> Damping {
        self.damping
    }

    fn prepare(&self, filters: &[ScalarFilter<'_, T>]) -> Result<FilterBank<T>> {
        let lambda_max = self.op.lambda_max();
        let expanded = filters
            .iter()
            .map(|g| self.quadrature.coefficients(g, lambda_max, self.damping))
            .collect::<Result<Vec<_>>>()?;
        FilterBank::new(expanded)
    }

    fn analyze(&self, bank: &FilterBank<T>, f: &[T]) -> Result<Vec<Vec<T>>> {
        apply_filter_bank(self.op, bank, f)
    }

    fn synthesize(&self, bank: &FilterBank<T>, coeffs: &[&[T]]) -> Result<Vec<T>> {
        synthesize_filter_bank(self.op, bank, coeffs)
    }

    fn quadratic_forms(&self, bank: &FilterBank<T>, f: &[T]) -> Result<Vec<T>> {
        let moments = chebyshev_moments(self.op, bank.lambda_max(), bank.degree(), f)?;
        Ok(bank
            .filters()
            .iter()
            .map(|filter| quadratic_form_from_moments(filter, &moments))
            .collect())
    }
}

/// Exact backend on a dense eigendecomposition.
#[derive(Debug, Clone, Copy)]
pub struct OracleCalculus<'a, T> {
    eig: &'a EigenSystem<T>,
}

/// Filter responses sampled at every eigenvalue.
#[derive(Debug, Clone)]
pub struct SampledBank<T> {
    responses: Vec<Vec<T>>,
}

impl<T> SampledBank<T> {
    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn responses(&self) -> &[Vec<T>] {
        &self.responses
    }
}

impl<'a, T: Scalar> OracleCalculus<'a, T> {
    pub fn new(eig: &'a EigenSystem<T>) -> Self {
        Self { eig }
    }

    pub fn eigensystem(&self) -> &'a EigenSystem<T> {
        self.eig
    }
}

impl<T: Scalar> SpectralCalculus<T> for OracleCalculus<'_, T> {
    type Bank = SampledBank<T>;

    fn n(&self) -> usize {
        self.eig.n()
    }

    fn lambda_max(&self) -> T {
        self.eig.lambda_1()
    }

    fn prepare(&self, filters: &[ScalarFilter<'_, T>]) -> Result<SampledBank<T>> {
        if filters.is_empty() {
            return Err(Error::InvalidParameter("filter bank is empty".into()));
        }
        let mut responses = Vec::with_capacity(filters.len());
        for g in filters {
            let mut row = Vec::with_capacity(self.eig.n());
            for (node, &lambda) in self.eig.values().iter().enumerate() {
                let v = g(lambda);
                if !v.is_finite() {
                    return Err(Error::NonFiniteFilter {
                        node,
                        lambda: lambda.to_f64_lossy(),
                    });
                }
                row.push(v);
            }
            responses.push(row);
        }
        Ok(SampledBank { responses })
    }

    fn analyze(&self, bank: &SampledBank<T>, f: &[T]) -> Result<Vec<Vec<T>>> {
        let spectrum = self.eig.gft(f)?;
        bank.responses
            .iter()
            .map(|response| {
                let scaled: Vec<T> = spectrum.iter().zip(response).map(|(&c, &g)| c * g).collect();
                self.eig.inverse_gft(&scaled)
            })
            .collect()
    }

    fn synthesize(&self, bank: &SampledBank<T>, coeffs: &[&[T]]) -> Result<Vec<T>> {
        if coeffs.len() != bank.len() {
            return Err(Error::DimensionMismatch {
                expected: bank.len(),
                actual: coeffs.len(),
            });
        }
        let n = self.eig.n();
        let mut spectrum = vec![T::zero(); n];
        for (response, eta) in bank.responses.iter().zip(coeffs) {
            let mut eta_hat = self.eig.gft(eta)?;
            eta_hat.iter_mut().zip(response).for_each(|(c, &g)| *c *= g);
            axpy(T::one(), &eta_hat, &mut spectrum);
        }
        self.eig.inverse_gft(&spectrum)
    }

    fn quadratic_forms(&self, bank: &SampledBank<T>, f: &[T]) -> Result<Vec<T>> {
        let spectrum = self.eig.gft(f)?;
        Ok(bank
            .responses
            .iter()
            .map(|response| {
                spectrum
                    .iter()
                    .zip(response)
                    .fold(T::zero(), |acc, (&c, &g)| acc + g * c * c)
            })
            .collect())
    }
}
