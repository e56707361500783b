//! EFM-signatures of piecewise-linear paths.
//!
//! Each linear segment has a closed-form signature; segments are glued with the
//! discounted Chen identity `𝕏_{s,t} = D_{t−u} 𝕏_{s,u} ⊗ 𝕏_{u,t}`.

mod diagnostics;
mod path;
mod segment;
mod stream;

pub use diagnostics::{bv_bound_check, bv_lambda_norm, fading_memory_gap, BvLevel, BvReport, FadingGap};
pub use path::PiecewisePath;
pub use segment::{segment_signature, stationary_linear_signature, SegmentKernel};
pub use stream::{chen_step, chen_update, signature_of_path, signature_trajectory, EfmStream, Origin, SigState};
