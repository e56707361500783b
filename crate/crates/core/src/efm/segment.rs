use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::rates::{RateTable, Rates};
use crate::tensor::{Shape, TensorSeq};
use std::sync::OnceLock;

/// Above this value of `max_v λ^v Δ` the closed exponential form is used, below it the power series.
const SERIES_LIMIT: f64 = 1.0;
/// Extra series terms beyond the word length; the remainder is below `1/20!`.
const SERIES_EXTRA: usize = 20;

/// Per-word weights of a linear segment for fixed rates and shape.
///
/// For a segment with increment `Δx` over duration `Δ` the coefficient of
/// `i_1 … i_n` is `G_w(Δ)·Δx^{i_1}···Δx^{i_n}` where `G_w(Δ) = g_w(Δ)/Δ^n` and
/// `g_w` is the iterated integral built by [`ExpPoly::step_integrate`].
#[derive(Debug)]
pub struct SegmentKernel {
    rates: Rates,
    table: RateTable,
    parent: Vec<usize>,
    letter: Vec<u8>,
    closed: OnceLock<Vec<ExpPoly>>,
}

impl SegmentKernel {
    pub fn new(rates: &Rates, shape: Shape) -> Result<Self> {
        let table = rates.table(shape)?;
        let w = shape.width();
        let mut parent = vec![0usize; shape.len()];
        let mut letter = vec![0u8; shape.len()];
        for n in 1..=shape.order() {
            let (off, poff) = (shape.offset(n), shape.offset(n - 1));
            for j in 0..shape.level_len(n) {
                parent[off + j] = poff + j / w;
                letter[off + j] = (j % w) as u8;
            }
        }
        Ok(SegmentKernel { rates: rates.clone(), table, parent, letter, closed: OnceLock::new() })
    }

    pub fn shape(&self) -> Shape {
        self.table.shape()
    }

    pub fn rates(&self) -> &Rates {
        &self.rates
    }

    pub fn table(&self) -> &RateTable {
        &self.table
    }

    /// Index of the word with its last letter removed.
    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    pub fn last_letter(&self) -> &[u8] {
        &self.letter
    }

    /// `g_w` for every word, as exponential polynomials in the elapsed time.
    pub fn closed_forms(&self) -> &[ExpPoly] {
        self.closed.get_or_init(|| {
            let rates = self.table.rates();
            let mut out: Vec<ExpPoly> = Vec::with_capacity(rates.len());
            out.push(ExpPoly::constant(1.0));
            for i in 1..rates.len() {
                let g = out[self.parent[i]].step_integrate(rates[i]);
                out.push(g);
            }
            out
        })
    }

    /// `G_w(Δ)` for every word.
    pub fn weights(&self, dt: f64) -> Vec<f64> {
        let shape = self.shape();
        let rates = self.table.rates();
        let top = rates.iter().copied().fold(0.0, f64::max);
        if top * dt <= SERIES_LIMIT {
            return self.series_weights(dt);
        }
        let closed = self.closed_forms();
        let mut out = vec![1.0; rates.len()];
        for n in 1..=shape.order() {
            let scale = dt.powi(n as i32);
            for i in shape.level_range(n) {
                out[i] = closed[i].eval(dt) / scale;
            }
        }
        out
    }

    fn series_weights(&self, dt: f64) -> Vec<f64> {
        let shape = self.shape();
        let rates = self.table.rates();
        let terms = shape.order() + SERIES_EXTRA;
        // e[v][j] = Δ^j·a_{v,|v|+j}, with (e_{v,j} = e_{v',j} − λ^vΔ e_{v,j−1}) / (|v| + j)
        let mut e = vec![0.0; rates.len() * terms];
        e[0] = 1.0;
        let mut out = vec![1.0; rates.len()];
        for n in 1..=shape.order() {
            for i in shape.level_range(n) {
                let x = rates[i] * dt;
                let p = self.parent[i];
                let mut prev = 0.0;
                let mut sum = 0.0;
                for j in 0..terms {
                    let v = (e[p * terms + j] - x * prev) / (n + j) as f64;
                    e[i * terms + j] = v;
                    sum += v;
                    prev = v;
                }
                out[i] = sum;
            }
        }
        out
    }

    /// Segment coefficients into `out` from precomputed weights and an effective increment.
    pub fn segment_into(&self, weights: &[f64], incr: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        for i in 1..out.len() {
            out[i] = out[self.parent[i]] * incr[self.letter[i] as usize];
        }
        for (o, w) in out.iter_mut().zip(weights) {
            *o *= w;
        }
    }

    /// Signature of the linear segment with the given effective increment.
    pub fn segment(&self, dt: f64, incr: &[f64]) -> TensorSeq {
        let mut out = vec![0.0; self.shape().len()];
        self.segment_into(&self.weights(dt), incr, &mut out);
        TensorSeq::from_coeffs(self.shape(), out).expect("shape")
    }
}

/// EFM-signature of the linear path with slope `x` over `duration`.
pub fn segment_signature(r: &Rates, x: &[f64], duration: f64, order: usize) -> Result<TensorSeq> {
    if duration < 0.0 {
        return Err(Error::InvalidArgument(format!("negative duration {duration}")));
    }
    check_width(r, x)?;
    let kernel = SegmentKernel::new(r, Shape::new(r.width(), order)?)?;
    let incr: Vec<f64> = x.iter().map(|v| v * duration).collect();
    Ok(kernel.segment(duration, &incr))
}

/// Limit of [`segment_signature`] as the duration goes to infinity: `Π x^{i_k} · Π 1/μ_k`.
pub fn stationary_linear_signature(r: &Rates, x: &[f64], order: usize) -> Result<TensorSeq> {
    check_width(r, x)?;
    if r.is_plain() {
        return Err(Error::Divergent("zero rates have no stationary signature".into()));
    }
    let shape = Shape::new(r.width(), order)?;
    let kernel = SegmentKernel::new(r, shape)?;
    let rates = kernel.table().rates();
    let mut out = vec![1.0; shape.len()];
    for i in 1..shape.len() {
        out[i] = out[kernel.parent[i]] * x[kernel.letter[i] as usize] / rates[i];
    }
    TensorSeq::from_coeffs(shape, out)
}

fn check_width(r: &Rates, x: &[f64]) -> Result<()> {
    if x.len() != r.width() {
        return Err(Error::AlphabetMismatch(x.len(), r.width()));
    }
    Ok(())
}
