use std::collections::BTreeSet;

use rand::Rng;

use super::WeightedGraph;
use crate::rng::rng_from;
use crate::{Error, Result, Scalar};

/// Symmetric k-nearest-neighbour graph on points sampled from a swiss roll.
///
/// Points follow `t = 1.5 pi (1 + 2u)`, `(t cos t, 21 v, t sin t)` with
/// `u, v ~ U(0, 1)`. Vertices `i` and `j` are joined when either is among the
/// other's `k_nn` nearest neighbours; the weight is `exp(-d^2 / (2 tau^2))`
/// with `tau` the mean k-NN distance.
pub fn synthetic_swissroll<T: Scalar>(n: usize, k_nn: usize, seed: u64) -> Result<WeightedGraph<T>> {
    if k_nn == 0 || n < k_nn + 1 {
        return Err(Error::InvalidParameter(format!(
            "swiss roll needs n >= k_nn + 1 and k_nn >= 1 (n = {n}, k_nn = {k_nn})"
        )));
    }
    let mut rng = rng_from(seed, 0);
    let points: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            let t = 1.5 * std::f64::consts::PI * (1.0 + 2.0 * rng.gen::<f64>());
            let h = 21.0 * rng.gen::<f64>();
            [t * t.cos(), h, t * t.sin()]
        })
        .collect();

    let dist2 =
        |a: &[f64; 3], b: &[f64; 3]| -> f64 { (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2) };

    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut knn_sum = 0.0;
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        scratch.clear();
        scratch.extend((0..n).filter(|&j| j != i).map(|j| (dist2(&points[i], &points[j]), j)));
        scratch.select_nth_unstable_by(k_nn - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d2, j) in &scratch[..k_nn] {
            knn_sum += d2.sqrt();
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let tau = knn_sum / (n * k_nn) as f64;
    let two_tau2 = 2.0 * tau * tau;
    WeightedGraph::new(
        n,
        pairs.into_iter().map(|(i, j)| {
            let w = (-dist2(&points[i], &points[j]) / two_tau2).exp();
            (i, j, T::lit(w))
        }),
    )
}
