//! Localized spectral analysis of signals on weighted graphs.
//!
//! Filters of the graph Laplacian are evaluated with truncated Chebyshev
//! expansions, restricted to disjoint intervals of the spectrum, and
//! combined with a Parseval wavelet frame into localized wavelets
//! ("LocLets"). On top of that sit a stochastic eigenvalue counter, an
//! entropy rule for choosing the partition, noise-level estimators, a
//! chi-square test for the Fourier support of a noisy signal and
//! thresholding denoisers.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, with `*32` variants for `f32`.

// `!(x > 0)` style guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod chebyshev;
pub mod denoise;
mod error;
pub mod frames;
pub mod graph;
pub mod rng;
mod scalar;
pub mod spectrum;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Graph = graph::WeightedGraph<f64>;
pub type Graph32 = graph::WeightedGraph<f32>;
pub type Laplacian = graph::LaplacianOperator<f64>;
pub type Laplacian32 = graph::LaplacianOperator<f32>;
pub type Eigensystem = graph::EigenSystem<f64>;
pub type Eigensystem32 = graph::EigenSystem<f32>;
pub type SpectralPartition = spectrum::Partition<f64>;
pub type SpectralPartition32 = spectrum::Partition<f32>;
pub type Frame = frames::FrameSpec<f64>;
pub type Frame32 = frames::FrameSpec<f32>;
pub type Filter = chebyshev::ChebyshevFilter<f64>;
pub type Filter32 = chebyshev::ChebyshevFilter<f32>;
pub type Config = denoise::DenoiseConfig<f64>;
pub type Config32 = denoise::DenoiseConfig<f32>;
