//! Words over a finite alphabet and truncated tensor-algebra arithmetic.
//!
//! A [`TensorSeq`] stores every coefficient up to its order densely, level by
//! level. Products silently drop levels above the truncation order.

mod io;
mod scalar;
mod seq;
mod shape;
mod shuffle;
mod word;

pub use io::{read_coeff_csv, read_rows, write_coeff_csv};
pub use scalar::Scalar;
pub use seq::{Norm, TensorSeq};
pub use shape::{Shape, DEFAULT_BUDGET};
pub use word::Word;
