//! Parseval SGWT, LocLet transforms on spectral intervals, and two
//! localized tight-frame constructions.

mod spec;
mod tight;
mod transform;
mod warped;

pub use spec::{parseval_filters, FrameSpec};
pub use tight::{support_partition, tight_loclet_frame_vectors, TightLocLetFrame};
pub use transform::{
    loclet_adjoint, loclet_forward, sgwt_adjoint, sgwt_forward, LocLetCoefficients, LocLetTransform, Sgwt,
};
pub use warped::{warped_frame_identity_check, warped_identity_deviation, WarpedKernel};
