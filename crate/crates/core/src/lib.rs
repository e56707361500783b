//! Exponentially fading memory (EFM) signatures.
//!
//! The EFM-signature of a path `X` with rates `λ` collects the iterated integrals
//!
//! ```text
//! 𝕏^{i_1…i_n}_{s,t} = ∫_{s<u_1<…<u_n<t} e^{−λ^{i_1}(t−u_1)} dX^{i_1}_{u_1} ⋯ e^{−λ^{i_n}(t−u_n)} dX^{i_n}_{u_n}
//! ```
//!
//! Module overview:
//!
//! * [`tensor`]: words, truncated tensor sequences, concatenation and shuffle products
//! * [`rates`]: per-letter rates and the diagonal operators `Λ`, `Λ†`, `D_h`, `C_h`
//! * [`exp_poly`]: exponential polynomials, the closed family of segment coefficients
//! * [`efm`]: signatures of piecewise-linear paths
//! * [`expectation`]: expected signatures of time-augmented Brownian motion, prediction
//! * [`lab`]: simulation and Monte Carlo experiments
//! * [`learning`]: Itô decomposition, OU representation, elastic-net regression
//! * [`riccati`]: characteristic functions through the mean-reverting Riccati equation

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod efm;
pub mod error;
pub mod exp_poly;
pub mod expectation;
pub mod lab;
pub mod learning;
pub mod rates;
pub mod riccati;
pub mod tensor;

pub use error::{Error, Result};
pub use rates::Rates;
pub use tensor::{Shape, TensorSeq, Word};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
