use super::FrameSpec;
use crate::calculus::{OracleCalculus, ScalarFilter, SpectralCalculus};
use crate::graph::EigenSystem;
use crate::spectrum::Partition;
use crate::{Error, Result, Scalar};

/// Partition matched to the kernel supports:
/// `I_0 = [0, 1)`, `I_k = [b^(k-1), b^k)` for `k = 1..=J`.
///
/// Kernel band `k` (`zeta_1(s_k .)`) is supported on `[b^(k-2), b^k]`,
/// which is covered by `I_{k-1}` and `I_k`.
pub fn support_partition<T: Scalar>(frame: &FrameSpec<T>) -> Result<Partition<T>> {
    let mut boundaries = vec![T::zero()];
    boundaries.extend((0..=frame.scale_count()).map(|k| frame.base().powi(k as i32)));
    Partition::from_boundaries(boundaries)
}

/// Analysis operator of the localized tight frame
/// `{ sqrt(zeta_0)(L_{I_k}) delta_m, sqrt(psi_k)(L_{I_{k-1}}) delta_m, sqrt(psi_k)(L_{I_k}) delta_m }`,
/// evaluated exactly on an eigendecomposition.
pub struct TightLocLetFrame<'a, T: Scalar> {
    calc: OracleCalculus<'a, T>,
    bank: <OracleCalculus<'a, T> as SpectralCalculus<T>>::Bank,
    members: usize,
}

impl<'a, T: Scalar> TightLocLetFrame<'a, T> {
    pub fn new(eig: &'a EigenSystem<T>, frame: &FrameSpec<T>, partition: &Partition<T>) -> Result<Self> {
        let expected = support_partition(frame)?;
        let consistent = partition.len() == expected.len()
            && partition
                .boundaries()
                .iter()
                .zip(expected.boundaries())
                .all(|(&a, &b)| (a - b).abs() <= T::lit(1e-12) * b.abs().max(T::one()));
        if !consistent {
            return Err(Error::InvalidParameter(
                "partition does not match the kernel supports of the frame".into(),
            ));
        }
        if eig.lambda_1() > partition.lambda_max() {
            return Err(Error::InvalidParameter("spectrum exceeds the support partition".into()));
        }
        let frame = *frame;
        let restricted = |band: usize, k: usize| -> ScalarFilter<'static, T> {
            let part = partition.clone();
            Box::new(move |l: T| {
                if part.locate(l) == Some(k) {
                    frame.band_response(band, l)
                } else {
                    T::zero()
                }
            })
        };
        let mut filters = Vec::new();
        for k in 0..partition.len() {
            filters.push(restricted(0, k));
        }
        for k in 1..=frame.scale_count() {
            filters.push(restricted(k, k - 1));
            filters.push(restricted(k, k));
        }
        let calc = OracleCalculus::new(eig);
        let bank = calc.prepare(&filters)?;
        Ok(Self {
            calc,
            bank,
            members: filters.len(),
        })
    }

    /// Number of frame vectors divided by `n`.
    pub fn families(&self) -> usize {
        self.members
    }

    /// Inner products `<f, r_i>` for every frame vector, family by family.
    pub fn analyze(&self, f: &[T]) -> Result<Vec<T>> {
        Ok(self.calc.analyze(&self.bank, f)?.into_iter().flatten().collect())
    }

    /// `sum_i |<f, r_i>|^2`
    pub fn energy(&self, f: &[T]) -> Result<T> {
        Ok(self.analyze(f)?.iter().map(|&c| c * c).sum())
    }
}

/// Builds the tight LocLet frame analysis operator.
pub fn tight_loclet_frame_vectors<'a, T: Scalar>(
    eig: &'a EigenSystem<T>,
    frame: &FrameSpec<T>,
    partition: &Partition<T>,
) -> Result<TightLocLetFrame<'a, T>> {
    TightLocLetFrame::new(eig, frame, partition)
}
