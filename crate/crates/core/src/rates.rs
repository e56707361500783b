//! Per-letter mean-reversion rates and the diagonal operators they induce.
//!
//! For a word `v = i_1 … i_n` the rate is `λ^v = Σ_k λ^{i_k}` with `λ^ø = 0`.
//! The operators act coefficientwise:
//!
//! * `Λ`:   `a^v ↦ λ^v a^v`
//! * `Λ†`:  `a^v ↦ a^v / λ^v`, zero where `λ^v = 0`
//! * `D_h`: `a^v ↦ e^{−λ^v h} a^v`
//! * `C_h`: `a^v ↦ (1 − e^{−λ^v h})/λ^v · a^v`, equal to `h` where `λ^v = 0`

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Shape, TensorSeq, Word};
use serde::{Deserialize, Serialize};

/// Positive rates, one per letter. Index 0 is the clock rate for time-augmented paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RatesJson", into = "RatesJson")]
pub struct Rates {
    lambda: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RatesJson {
    lambda: Vec<f64>,
}

impl TryFrom<RatesJson> for Rates {
    type Error = Error;
    fn try_from(j: RatesJson) -> Result<Self> {
        Rates::new(j.lambda)
    }
}

impl From<Rates> for RatesJson {
    fn from(r: Rates) -> Self {
        RatesJson { lambda: r.lambda }
    }
}

impl Rates {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidArgument("no rates given".into()));
        }
        if let Some(bad) = lambda.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidArgument(format!("rate {bad} is not a positive finite number")));
        }
        Ok(Rates { lambda })
    }

    /// The same rate on every letter.
    pub fn uniform(width: usize, lambda: f64) -> Result<Self> {
        Rates::new(vec![lambda; width])
    }

    /// All rates zero: `D ≡ id`, `Λ ≡ 0`. Computes ordinary (unweighted) signatures.
    pub fn plain(width: usize) -> Self {
        Rates { lambda: vec![0.0; width] }
    }

    pub fn is_plain(&self) -> bool {
        self.lambda.iter().all(|&l| l == 0.0)
    }

    pub fn width(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn min(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_of(&self, w: &Word) -> Result<f64> {
        w.check(self.width())?;
        Ok(w.letters().iter().map(|&l| self.lambda[l as usize]).sum())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rates serialize")
    }

    /// `λ^v` for every word of `shape`, in coefficient order.
    pub fn table(&self, shape: Shape) -> Result<RateTable> {
        if shape.width() != self.width() {
            return Err(Error::AlphabetMismatch(shape.width(), self.width()));
        }
        let mut word_rates = Vec::with_capacity(shape.len());
        word_rates.push(0.0);
        for n in 1..=shape.order() {
            let prev = shape.level_range(n - 1);
            for p in prev {
                let base = word_rates[p];
                for &l in &self.lambda {
                    word_rates.push(base + l);
                }
            }
        }
        Ok(RateTable { shape, word_rates })
    }

    pub fn apply_lambda<S: Scalar>(&self, a: &TensorSeq<S>) -> Result<TensorSeq<S>> {
        let t = self.table(a.shape())?;
        Ok(t.zip(a, |l| l))
    }

    pub fn apply_lambda_dagger<S: Scalar>(&self, a: &TensorSeq<S>) -> Result<TensorSeq<S>> {
        let t = self.table(a.shape())?;
        Ok(t.zip(a, |l| if l == 0.0 { 0.0 } else { 1.0 / l }))
    }

    pub fn apply_d<S: Scalar>(&self, h: f64, a: &TensorSeq<S>) -> Result<TensorSeq<S>> {
        let t = self.table(a.shape())?;
        Ok(t.zip(a, |l| (-l * h).exp()))
    }

    pub fn apply_c<S: Scalar>(&self, h: f64, a: &TensorSeq<S>) -> Result<TensorSeq<S>> {
        if h < 0.0 {
            return Err(Error::InvalidArgument(format!("C_h needs h >= 0, got {h}")));
        }
        let t = self.table(a.shape())?;
        Ok(t.zip(a, |l| c_factor(l, h)))
    }

    /// `Σ_{k ≤ max_terms} H_x^k ø` with `H_x ℓ = Λ†(ℓ ⊗ x)`.
    pub fn stationary_series_h(&self, x: &TensorSeq, max_terms: usize) -> Result<TensorSeq> {
        if x.empty_coeff() != 0.0 {
            return Err(Error::InvalidArgument("x must have a zero coefficient on the empty word".into()));
        }
        let table = self.table(x.shape())?;
        let mut term = TensorSeq::unit(x.shape());
        let mut sum = term.clone();
        for _ in 0..max_terms {
            term = table.zip(&term.tensor(x)?, |l| if l == 0.0 { 0.0 } else { 1.0 / l });
            if term.norm_l2() == 0.0 {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }
}

/// `(1 − e^{−λh})/λ`, equal to `h` at `λ = 0`.
pub fn c_factor(lambda: f64, h: f64) -> f64 {
    let x = lambda * h;
    if lambda == 0.0 {
        h
    } else if x.abs() < 1e-8 {
        h * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1() / lambda
    }
}

/// Per-word rates for one shape; reused by the streaming kernels.
#[derive(Clone, Debug)]
pub struct RateTable {
    shape: Shape,
    word_rates: Vec<f64>,
}

impl RateTable {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rates(&self) -> &[f64] {
        &self.word_rates
    }

    pub fn discount(&self, h: f64) -> Vec<f64> {
        self.word_rates.iter().map(|l| (-l * h).exp()).collect()
    }

    pub fn c_factors(&self, h: f64) -> Vec<f64> {
        self.word_rates.iter().map(|&l| c_factor(l, h)).collect()
    }

    fn zip<S: Scalar>(&self, a: &TensorSeq<S>, f: impl Fn(f64) -> f64) -> TensorSeq<S> {
        let coeffs = a.coeffs().iter().zip(&self.word_rates).map(|(&c, &l)| c.scale(f(l))).collect();
        TensorSeq::from_coeffs(a.shape(), coeffs).expect("shape matches")
    }

    /// Multiplies `a` in place by per-word factors.
    pub fn scale_in_place<S: Scalar>(factors: &[f64], a: &mut TensorSeq<S>) {
        for (c, &f) in a.coeffs_mut().iter_mut().zip(factors) {
            *c = c.scale(f);
        }
    }
}
