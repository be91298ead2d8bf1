use super::SupportEstimate;
use crate::calculus::SpectralCalculus;
use crate::frames::{FrameSpec, LocLetTransform};
use crate::graph::EigenSystem;
use crate::scalar::{axpy, dot};
use crate::spectrum::Partition;
use crate::{Error, Result, Scalar};

/// `sign(c) max(|c| - t, 0)` elementwise.
pub fn soft_threshold<T: Scalar>(coeffs: &[T], t: T) -> Vec<T> {
    coeffs.iter().map(|&c| shrink(c, t)).collect()
}

#[inline]
fn shrink<T: Scalar>(c: T, t: T) -> T {
    let m = c.abs() - t;
    if m > T::zero() {
        m.copysign(c)
    } else {
        T::zero()
    }
}

fn check_threshold<T: Scalar>(t: T) -> Result<()> {
    if t >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "threshold must be nonnegative, got {t}"
        )))
    }
}

/// Side of the support split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Support,
    Complement,
}

/// LocLet coefficients of one signal on the two sides of a support split,
/// kept so that many threshold pairs can be tried without redoing the
/// analysis.
pub struct LocLetShrinkage<'c, T: Scalar, C: SpectralCalculus<T>> {
    transform: LocLetTransform<'c, T, C>,
    coeffs: Vec<Vec<Vec<T>>>,
    // position of each side among the transform's groups; empty sides are dropped
    slots: [Option<usize>; 2],
}

impl<'c, T: Scalar, C: SpectralCalculus<T>> LocLetShrinkage<'c, T, C> {
    pub fn new(
        calc: &'c C,
        frame: FrameSpec<T>,
        partition: &Partition<T>,
        support: &SupportEstimate<T>,
        f: &[T],
    ) -> Result<Self> {
        let mut groups = Vec::new();
        let mut slots = [None, None];
        for (slot, members) in slots.iter_mut().zip([&support.selected, &support.complement]) {
            if !members.is_empty() {
                *slot = Some(groups.len());
                groups.push(members.clone());
            }
        }
        if groups.is_empty() {
            return Err(Error::InvalidParameter("support split covers no interval".into()));
        }
        let transform = LocLetTransform::grouped(calc, frame, partition, groups)?;
        let coeffs = transform.forward(f)?;
        Ok(Self {
            transform,
            coeffs,
            slots,
        })
    }

    fn slot(side: Side) -> usize {
        match side {
            Side::Support => 0,
            Side::Complement => 1,
        }
    }

    pub fn coefficients(&self, side: Side) -> Option<&[Vec<T>]> {
        self.slots[Self::slot(side)].map(|g| self.coeffs[g].as_slice())
    }

    fn thresholded(&self, g: usize, t: T) -> Vec<Vec<T>> {
        self.coeffs[g].iter().map(|band| soft_threshold(band, t)).collect()
    }

    /// Reconstruction of one side after soft thresholding at `t`; zero when
    /// the side holds no interval.
    pub fn reconstruct_side(&self, side: Side, t: T) -> Result<Vec<T>> {
        check_threshold(t)?;
        let Some(g) = self.slots[Self::slot(side)] else {
            return Ok(vec![T::zero(); self.coeffs[0][0].len()]);
        };
        let shrunk = self.thresholded(g, t);
        let mut args: Vec<Option<&[Vec<T>]>> = vec![None; self.transform.groups().len()];
        args[g] = Some(&shrunk);
        self.transform.adjoint(&args)
    }

    /// `t_support` on the selected intervals, `t_complement` elsewhere.
    pub fn reconstruct(&self, t_support: T, t_complement: T) -> Result<Vec<T>> {
        check_threshold(t_support)?;
        check_threshold(t_complement)?;
        let shrunk: Vec<Vec<Vec<T>>> = (0..self.coeffs.len())
            .map(|g| {
                let t = if self.slots[0] == Some(g) {
                    t_support
                } else {
                    t_complement
                };
                self.thresholded(g, t)
            })
            .collect();
        let args: Vec<Option<&[Vec<T>]>> = shrunk.iter().map(|g| Some(g.as_slice())).collect();
        self.transform.adjoint(&args)
    }
}

/// Indices of the eigenpairs whose eigenvalue falls in one of `members`.
pub fn eigen_indices_in<T: Scalar>(eig: &EigenSystem<T>, partition: &Partition<T>, members: &[usize]) -> Vec<usize> {
    eig.values()
        .iter()
        .enumerate()
        .filter(|(_, &l)| partition.locate(l).is_some_and(|k| members.contains(&k)))
        .map(|(i, _)| i)
        .collect()
}

/// Parseval-frame thresholding restricted to a set of eigenpairs.
///
/// The frame vectors are `r_{j,m} = sum_{l in S} sqrt(zeta_j(lambda_l)) chi_l(m) chi_l`.
/// Coefficient `<f, r_{j,m}>` is shrunk with threshold `t ||r_{j,m}||`, so a
/// single level acts uniformly on the noise whatever the vector norms.
pub struct ParsevalShrinkage<'e, T: Scalar> {
    eig: &'e EigenSystem<T>,
    indices: Vec<usize>,
    // weights[j][i] = sqrt(zeta_j(lambda_{indices[i]}))
    weights: Vec<Vec<T>>,
    coeffs: Vec<Vec<T>>,
    norms: Vec<Vec<T>>,
}

impl<'e, T: Scalar> ParsevalShrinkage<'e, T> {
    pub fn new(eig: &'e EigenSystem<T>, frame: &FrameSpec<T>, indices: Vec<usize>, f: &[T]) -> Result<Self> {
        let n = eig.n();
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: f.len(),
            });
        }
        if let Some(&bad) = indices.iter().find(|&&l| l >= n) {
            return Err(Error::InvalidParameter(format!("eigenpair index {bad} out of range")));
        }
        let spectral: Vec<T> = indices.iter().map(|&l| dot(eig.vector(l), f)).collect();
        let weights: Vec<Vec<T>> = (0..frame.band_count())
            .map(|j| {
                indices
                    .iter()
                    .map(|&l| frame.band_response(j, eig.values()[l]))
                    .collect()
            })
            .collect();
        let mut coeffs = Vec::with_capacity(weights.len());
        let mut norms = Vec::with_capacity(weights.len());
        for w in &weights {
            let mut c = vec![T::zero(); n];
            let mut sq = vec![T::zero(); n];
            for (i, &l) in indices.iter().enumerate() {
                if w[i] == T::zero() {
                    continue;
                }
                let chi = eig.vector(l);
                axpy(w[i] * spectral[i], chi, &mut c);
                let w2 = w[i] * w[i];
                sq.iter_mut().zip(chi).for_each(|(s, &x)| *s += w2 * x * x);
            }
            coeffs.push(c);
            norms.push(sq.into_iter().map(|s| s.sqrt()).collect());
        }
        Ok(Self {
            eig,
            indices,
            weights,
            coeffs,
            norms,
        })
    }

    /// Number of eigenpairs in the restricted frame.
    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn coefficients(&self) -> &[Vec<T>] {
        &self.coeffs
    }

    pub fn reconstruct(&self, t: T) -> Result<Vec<T>> {
        check_threshold(t)?;
        let n = self.eig.n();
        let mut spectral = vec![T::zero(); self.indices.len()];
        for ((w, c), r) in self.weights.iter().zip(&self.coeffs).zip(&self.norms) {
            let shrunk: Vec<T> = c.iter().zip(r).map(|(&c, &r)| shrink(c, t * r)).collect();
            for (i, &l) in self.indices.iter().enumerate() {
                if w[i] != T::zero() {
                    spectral[i] += w[i] * dot(self.eig.vector(l), &shrunk);
                }
            }
        }
        let mut out = vec![T::zero(); n];
        for (i, &l) in self.indices.iter().enumerate() {
            if spectral[i] != T::zero() {
                axpy(spectral[i], self.eig.vector(l), &mut out);
            }
        }
        Ok(out)
    }
}
