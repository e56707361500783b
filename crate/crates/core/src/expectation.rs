//! Expected EFM-signatures of time-augmented Brownian motion and conditional prediction.
//!
//! In Itô form the time-augmented Brownian signature has drift `x = 0 + ½ Σ_i ii`,
//! so `Ê_t = ∫_0^t D_{t−u}(Ê_u ⊗ x) du`. Only words built from the blocks `0`
//! and `ii` carry mass.

use crate::efm::{SegmentKernel, SigState};
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq, Word};

/// Expected signature over a horizon (`None` for the stationary limit).
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedSig {
    pub horizon: Option<f64>,
    pub value: TensorSeq,
}

fn shape_for(r: &Rates, d: usize, order: usize) -> Result<Shape> {
    if r.width() != d + 1 {
        return Err(Error::AlphabetMismatch(r.width(), d + 1));
    }
    Shape::new(d + 1, order)
}

/// `0 + ½ Σ_i ii`, the Itô drift of the time-augmented Brownian signature.
pub fn brownian_drift(shape: Shape) -> TensorSeq {
    let mut x = TensorSeq::zeros(shape);
    if shape.order() >= 1 {
        x.set(&Word::letter(0), 1.0).expect("order >= 1");
    }
    if shape.order() >= 2 {
        for i in 1..shape.width() as u8 {
            x.set(&Word::new(&[i, i]), 0.5).expect("order >= 2");
        }
    }
    x
}

/// Stationary expected signature from `Ê^{v0} = Ê^v/λ^{v0}`, `Ê^{vii} = ½Ê^v/λ^{vii}`.
pub fn expected_signature_stationary(r: &Rates, d: usize, order: usize) -> Result<ExpectedSig> {
    let shape = shape_for(r, d, order)?;
    let kernel = SegmentKernel::new(r, shape)?;
    let (parent, last, rates) = (kernel.parent(), kernel.last_letter(), kernel.table().rates());
    let mut e = vec![0.0; shape.len()];
    e[0] = 1.0;
    for n in 1..=order {
        for i in shape.level_range(n) {
            let p = parent[i];
            e[i] = if last[i] == 0 {
                e[p] / rates[i]
            } else if n >= 2 && last[p] == last[i] {
                0.5 * e[parent[p]] / rates[i]
            } else {
                0.0
            };
        }
    }
    Ok(ExpectedSig { horizon: None, value: TensorSeq::from_coeffs(shape, e)? })
}

/// `Ê_h`, exact, via segment weights on the block alphabet `{0, 11, …, dd}`.
pub fn expected_signature_transient(r: &Rates, d: usize, order: usize, h: f64) -> Result<ExpectedSig> {
    if !(h >= 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be nonnegative, got {h}")));
    }
    if h.is_infinite() {
        return expected_signature_stationary(r, d, order);
    }
    let shape = shape_for(r, d, order)?;
    let mut block_rates = vec![r.lambda()[0]];
    block_rates.extend(r.lambda()[1..].iter().map(|l| 2.0 * l));
    let block_rates = Rates::new(block_rates)?;
    let block_shape = Shape::new(d + 1, order)?;
    let kernel = SegmentKernel::new(&block_rates, block_shape)?;
    let mut incr = vec![0.5 * h; d + 1];
    incr[0] = h;
    let block_sig = kernel.segment(h, &incr);
    let mut out = TensorSeq::zeros(shape);
    for n in 0..=order {
        for (j, &c) in block_sig.level(n).iter().enumerate() {
            let blocks = block_shape.word_in_level(n, j);
            let mut letters = Vec::with_capacity(2 * n);
            for &b in blocks.letters() {
                letters.push(b);
                if b != 0 {
                    letters.push(b);
                }
            }
            if letters.len() <= order {
                out.set(&Word::new(&letters), c)?;
            }
        }
    }
    Ok(ExpectedSig { horizon: Some(h), value: out })
}

/// Conditional mean and variance of `⟨sig_{t+h}, ℓ⟩` given the state at `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

/// Values of `ℓ⧢ℓ` pairings in `[−tol, 0)` are clipped to zero; below `−tol` they are an error.
pub const VARIANCE_CLIP: f64 = 1e-10;

fn forward(r: &Rates, state: &SigState, h: f64) -> Result<TensorSeq> {
    let shape = state.sig.shape();
    let e = expected_signature_transient(r, shape.width() - 1, shape.order(), h)?;
    r.apply_d(h, &state.sig)?.tensor(&e.value)
}

/// `E[⟨sig_{t+h}, ℓ⟩ | F_t] = ⟨ℓ, D_h sig_t ⊗ Ê_h⟩`.
pub fn predict_mean(r: &Rates, ell: &TensorSeq, state: &SigState, h: f64) -> Result<f64> {
    forward(r, state, h)?.bracket(ell)
}

/// Mean and variance; requires `2·deg ℓ ≤ N`.
pub fn predict(r: &Rates, ell: &TensorSeq, state: &SigState, h: f64) -> Result<Prediction> {
    let order = state.sig.order();
    let needed = 2 * ell.degree();
    if needed > order {
        return Err(Error::TruncationTooLow { order, needed });
    }
    let f = forward(r, state, h)?;
    let mean = f.bracket(ell)?;
    let second = f.bracket(&ell.shuffle(ell)?)?;
    let mut variance = second - mean * mean;
    if variance < 0.0 {
        if variance < -VARIANCE_CLIP {
            return Err(Error::NegativeVariance(variance));
        }
        log::warn!("clipping negative variance {variance:e} to zero");
        variance = 0.0;
    }
    Ok(Prediction { mean, variance })
}

/// `true` if `w` splits into the blocks `0` and `ii`.
pub fn is_block_word(w: &Word) -> bool {
    let l = w.letters();
    let mut k = 0;
    while k < l.len() {
        if l[k] == 0 {
            k += 1;
        } else if k + 1 < l.len() && l[k + 1] == l[k] {
            k += 2;
        } else {
            return false;
        }
    }
    true
}
