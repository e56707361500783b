use super::{PiecewisePath, SegmentKernel};
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq};

/// A signature together with the time and point it was last advanced to.
#[derive(Clone, Debug, PartialEq)]
pub struct SigState {
    pub t: f64,
    pub sig: TensorSeq,
    point: Vec<f64>,
}

/// Where a path signature starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// `𝕏_{t_0, t}` over the sampled window.
    Start,
    /// The path is constant before its first sample, clock included, so the
    /// state at `t_0` is again ø and the value coincides with [`Origin::Start`].
    FlatPast,
}

impl SigState {
    /// ø at time `t` with effective point `point` (clock coordinate first when augmented).
    pub fn new(shape: Shape, t: f64, point: Vec<f64>) -> Result<Self> {
        if point.len() != shape.width() {
            return Err(Error::AlphabetMismatch(point.len(), shape.width()));
        }
        Ok(SigState { t, sig: TensorSeq::unit(shape), point })
    }

    /// A state carrying an arbitrary tensor, e.g. for the fundamental solution.
    pub fn with_sig(sig: TensorSeq, t: f64, point: Vec<f64>) -> Result<Self> {
        if point.len() != sig.width() {
            return Err(Error::AlphabetMismatch(point.len(), sig.width()));
        }
        Ok(SigState { t, sig, point })
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }
}

/// Streaming discounted Chen updates `sig ← D_Δ sig ⊗ seg` for one rate set and shape.
#[derive(Debug)]
pub struct EfmStream {
    kernel: SegmentKernel,
    dt: f64,
    discount: Vec<f64>,
    weights: Vec<f64>,
    seg: Vec<f64>,
    scratch: Vec<f64>,
}

impl EfmStream {
    pub fn new(rates: &Rates, shape: Shape) -> Result<Self> {
        let kernel = SegmentKernel::new(rates, shape)?;
        let n = shape.len();
        let mut s = EfmStream {
            kernel,
            dt: f64::NAN,
            discount: vec![1.0; n],
            weights: vec![1.0; n],
            seg: vec![0.0; n],
            scratch: vec![0.0; n],
        };
        s.prepare(0.0);
        Ok(s)
    }

    pub fn shape(&self) -> Shape {
        self.kernel.shape()
    }

    pub fn kernel(&self) -> &SegmentKernel {
        &self.kernel
    }

    fn prepare(&mut self, dt: f64) {
        if dt.to_bits() != self.dt.to_bits() {
            self.dt = dt;
            self.discount = self.kernel.table().discount(dt);
            self.weights = self.kernel.weights(dt);
        }
    }

    /// Advances `sig` over one segment of duration `dt` with effective increment `incr`.
    pub fn advance(&mut self, sig: &mut TensorSeq, dt: f64, incr: &[f64]) {
        self.prepare(dt);
        self.kernel.segment_into(&self.weights, incr, &mut self.seg);
        chen_update(self.shape(), sig.coeffs_mut(), &self.discount, &self.seg, &mut self.scratch);
    }

    pub fn step(&mut self, state: &mut SigState, next_time: f64, next_point: &[f64]) -> Result<()> {
        if next_time < state.t {
            return Err(Error::TimeRegression { current: state.t, next: next_time });
        }
        if next_point.len() != state.point.len() {
            return Err(Error::AlphabetMismatch(next_point.len(), state.point.len()));
        }
        let incr: Vec<f64> = next_point.iter().zip(&state.point).map(|(a, b)| a - b).collect();
        self.advance(&mut state.sig, next_time - state.t, &incr);
        state.t = next_time;
        state.point.copy_from_slice(next_point);
        Ok(())
    }

    /// Folds the segments `k0..k1` of `path` into `sig`.
    pub fn fold(&mut self, sig: &mut TensorSeq, path: &PiecewisePath, k0: usize, k1: usize) {
        let mut incr = vec![0.0; path.width()];
        for k in k0..k1 {
            path.increment_into(k, &mut incr);
            let dt = path.times()[k + 1] - path.times()[k];
            self.advance(sig, dt, &incr);
        }
    }
}

/// `sig ← D(sig) ⊗ seg`, in place, with `seg^ø = 1`.
pub fn chen_update(shape: Shape, sig: &mut [f64], discount: &[f64], seg: &[f64], scratch: &mut [f64]) {
    for ((s, &x), &d) in scratch.iter_mut().zip(sig.iter()).zip(discount) {
        *s = x * d;
    }
    for n in 0..=shape.order() {
        let dst = shape.level_range(n);
        let dst = &mut sig[dst];
        dst.copy_from_slice(&scratch[shape.level_range(n)]);
        for k in 0..n {
            let left = &scratch[shape.level_range(k)];
            let right = &seg[shape.level_range(n - k)];
            let m = right.len();
            for (p, &a) in left.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in dst[p * m..(p + 1) * m].iter_mut().zip(right) {
                    *o += a * b;
                }
            }
        }
    }
}

/// One discounted Chen step from `state` to `(next_time, next_point)`.
pub fn chen_step(r: &Rates, state: &SigState, next_time: f64, next_point: &[f64]) -> Result<SigState> {
    let mut stream = EfmStream::new(r, state.sig.shape())?;
    let mut out = state.clone();
    stream.step(&mut out, next_time, next_point)?;
    Ok(out)
}

/// EFM-signature of a piecewise-linear path at its last sample.
pub fn signature_of_path(r: &Rates, path: &PiecewisePath, order: usize, origin: Origin) -> Result<SigState> {
    let shape = Shape::new(path.width(), order)?;
    if r.width() != shape.width() {
        return Err(Error::AlphabetMismatch(r.width(), shape.width()));
    }
    let mut stream = EfmStream::new(r, shape)?;
    let mut state = match origin {
        Origin::Start | Origin::FlatPast => SigState::new(shape, path.start(), effective_point(path, 0))?,
    };
    stream.fold(&mut state.sig, path, 0, path.len() - 1);
    state.t = path.end();
    state.point = effective_point(path, path.len() - 1);
    Ok(state)
}

/// Signatures at every sample of `path`, starting from ø at the first one.
pub fn signature_trajectory(r: &Rates, path: &PiecewisePath, order: usize) -> Result<Vec<TensorSeq>> {
    let shape = Shape::new(path.width(), order)?;
    let mut stream = EfmStream::new(r, shape)?;
    let mut sig = TensorSeq::unit(shape);
    let mut out = Vec::with_capacity(path.len());
    out.push(sig.clone());
    for k in 0..path.len() - 1 {
        stream.fold(&mut sig, path, k, k + 1);
        out.push(sig.clone());
    }
    Ok(out)
}

fn effective_point(path: &PiecewisePath, k: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(path.width());
    if path.is_time_augmented() {
        p.push(path.times()[k]);
    }
    p.extend_from_slice(path.value(k));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efm::segment_signature;
    use crate::tensor::Word;
    use approx::assert_relative_eq;

    #[test]
    fn zero_step_and_constant_path() {
        let r = Rates::new(vec![1.0, 2.0]).unwrap();
        let shape = Shape::new(2, 3).unwrap();
        let st = SigState::new(shape, 0.0, vec![0.0, 1.0]).unwrap();
        assert_eq!(chen_step(&r, &st, 0.0, &[0.0, 1.0]).unwrap(), st);
        let moved = chen_step(&r, &st, 2.0, &[0.0, 1.0]).unwrap();
        assert_eq!(moved.sig, TensorSeq::unit(shape));
        assert!(matches!(chen_step(&r, &moved, 1.0, &[0.0, 1.0]), Err(Error::TimeRegression { .. })));
    }

    #[test]
    fn half_steps_match_full_step() {
        let r = Rates::new(vec![0.8, 1.7, 2.2]).unwrap();
        let shape = Shape::new(3, 4).unwrap();
        let x = [1.0, -0.6, 1.4];
        let st = SigState::new(shape, 0.0, vec![0.0; 3]).unwrap();
        let full = chen_step(&r, &st, 0.9, &x.map(|v| v * 0.9)).unwrap();
        let half = chen_step(&r, &st, 0.45, &x.map(|v| v * 0.45)).unwrap();
        let two = chen_step(&r, &half, 0.9, &x.map(|v| v * 0.9)).unwrap();
        assert!(full.sig.max_abs_diff(&two.sig) < 1e-12);
        let seg = segment_signature(&r, &x, 0.9, 4).unwrap();
        assert!(full.sig.max_abs_diff(&seg) < 1e-15);
    }

    #[test]
    fn clock_word_converges_to_inverse_rate() {
        let r = Rates::new(vec![0.5, 1.0]).unwrap();
        let path = PiecewisePath::sample(0.0, 40.0, 400, 1, |_| vec![0.0], true).unwrap();
        let st = signature_of_path(&r, &path, 2, Origin::FlatPast).unwrap();
        assert_relative_eq!(st.sig.get(&Word::letter(0)), 2.0, epsilon = 1e-7);
        assert_eq!(st.t, 40.0);
    }
}
