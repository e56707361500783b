//! Lane-batched Chen updates for many time-augmented Brownian paths on a common grid.

use super::sim::{BmIncrements, SimConfig};
use crate::efm::SegmentKernel;
use crate::error::Result;
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq};

/// Paths advanced together.
pub const LANES: usize = 8;

pub type Lane = [f64; LANES];

/// Fixed-step update plan: discount factors and segment weights.
#[derive(Debug)]
pub struct BatchKernel {
    shape: Shape,
    dt: f64,
    discount: Vec<f64>,
    weights: Vec<f64>,
    /// Index range of each level.
    levels: Vec<std::ops::Range<usize>>,
    /// `(dst, left, right)`: `sig[dst] += dsig[left]·seg[right]`, both words nonempty.
    triples: Vec<[u32; 3]>,
}

/// `o + a·b` lanewise.
#[inline(always)]
fn fma_lane(o: Lane, a: Lane, b: Lane) -> Lane {
    std::array::from_fn(|l| o[l] + a[l] * b[l])
}

#[inline(always)]
fn mul_lane(a: Lane, b: Lane) -> Lane {
    std::array::from_fn(|l| a[l] * b[l])
}

impl BatchKernel {
    pub fn new(rates: &Rates, shape: Shape, dt: f64) -> Result<Self> {
        let k = SegmentKernel::new(rates, shape)?;
        let levels = (0..=shape.order()).map(|n| shape.level_range(n)).collect();
        let mut triples = Vec::new();
        for n in 2..=shape.order() {
            for l in 1..n {
                let (lo, ro, m) = (shape.offset(l), shape.offset(n - l), shape.level_len(n - l));
                for p in 0..shape.level_len(l) {
                    for s in 0..m {
                        triples.push([(shape.offset(n) + p * m + s) as u32, (lo + p) as u32, (ro + s) as u32]);
                    }
                }
            }
        }
        Ok(BatchKernel { shape, dt, discount: k.table().discount(dt), weights: k.weights(dt), levels, triples })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step for all lanes. `incr[i]` is the increment of letter `i`.
    pub fn step(&self, sig: &mut [Lane], incr: &[Lane], work: &mut Workspace) {
        let Workspace { seg, dsig } = work;
        let lv = &self.levels;
        let w = self.shape.width();
        // segment products level by level: seg[v i] = seg[v]·Δx^i
        seg[0] = [1.0; LANES];
        for n in 1..lv.len() {
            let (prev, cur) = seg.split_at_mut(lv[n].start);
            for (p, out) in prev[lv[n - 1].clone()].iter().zip(cur.chunks_exact_mut(w)) {
                for (o, x) in out.iter_mut().zip(incr) {
                    *o = mul_lane(*p, *x);
                }
            }
        }
        let d0 = mul_lane(sig[0], [self.discount[0]; LANES]);
        for i in 0..sig.len() {
            let ds = mul_lane(sig[i], [self.discount[i]; LANES]);
            let g = mul_lane(seg[i], [self.weights[i]; LANES]);
            dsig[i] = ds;
            seg[i] = g;
            sig[i] = fma_lane(ds, d0, g);
        }
        sig[0] = d0;
        for &[d, a, b] in &self.triples {
            let (d, a, b) = (d as usize, a as usize, b as usize);
            sig[d] = fma_lane(sig[d], dsig[a], seg[b]);
        }
    }
}

/// Scratch buffers for [`BatchKernel::step`].
pub struct Workspace {
    seg: Vec<Lane>,
    dsig: Vec<Lane>,
}

impl Workspace {
    pub fn new(shape: Shape) -> Self {
        Workspace { seg: vec![[0.0; LANES]; shape.len()], dsig: vec![[0.0; LANES]; shape.len()] }
    }
}

/// `LANES` time-augmented Brownian signatures driven by consecutive path indices.
pub struct BrownianLanes {
    pub sig: Vec<Lane>,
    work: Workspace,
    sources: Vec<BmIncrements>,
    incr: Vec<Lane>,
    buf: Vec<f64>,
    /// Number of real paths in this batch (the rest are padding).
    pub active: usize,
}

impl BrownianLanes {
    /// Paths `first .. first + LANES` (capped at `n_paths`), increments from grid step `k`.
    pub fn new(cfg: &SimConfig, shape: Shape, first: u64, n_paths: u64, k: i64) -> Self {
        let active = (n_paths.saturating_sub(first)).min(LANES as u64) as usize;
        let sources = (0..LANES as u64).map(|l| BmIncrements::new(cfg, first + l.min(active.max(1) as u64 - 1), k)).collect();
        let mut sig = vec![[0.0; LANES]; shape.len()];
        sig[0] = [1.0; LANES];
        let mut incr = vec![[0.0; LANES]; shape.width()];
        incr[0] = [cfg.dt; LANES];
        BrownianLanes { sig, work: Workspace::new(shape), sources, incr, buf: vec![0.0; cfg.d], active }
    }

    /// Resets every lane to ø.
    pub fn reset(&mut self) {
        self.sig.iter_mut().for_each(|c| *c = [0.0; LANES]);
        self.sig[0] = [1.0; LANES];
    }

    /// Draws the next increments and returns them (one `Lane` per letter, clock first).
    pub fn draw(&mut self) -> &[Lane] {
        for l in 0..LANES {
            self.sources[l].next_into(&mut self.buf);
            for (i, v) in self.buf.iter().enumerate() {
                self.incr[i + 1][l] = *v;
            }
        }
        &self.incr
    }

    /// Advances using the increments from the last [`draw`](Self::draw).
    pub fn apply(&mut self, kernel: &BatchKernel) {
        kernel.step(&mut self.sig, &self.incr, &mut self.work);
    }

    pub fn step(&mut self, kernel: &BatchKernel) {
        self.draw();
        self.apply(kernel);
    }

    pub fn lane(&self, l: usize, shape: Shape) -> TensorSeq {
        TensorSeq::from_coeffs(shape, self.sig.iter().map(|c| c[l]).collect()).expect("shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efm::EfmStream;

    #[test]
    fn lanes_match_scalar_stream() {
        let r = Rates::new(vec![1.0, 0.5, 2.0]).unwrap();
        let shape = Shape::new(3, 4).unwrap();
        let cfg = SimConfig::new(9, 0.01, 0.0, 1.0, 2, 0.0).unwrap();
        let kernel = BatchKernel::new(&r, shape, cfg.dt).unwrap();
        let mut lanes = BrownianLanes::new(&cfg, shape, 0, 5, 0);
        assert_eq!(lanes.active, 5);
        let mut scalar: Vec<TensorSeq> = (0..LANES).map(|_| TensorSeq::unit(shape)).collect();
        let mut stream = EfmStream::new(&r, shape).unwrap();
        for _ in 0..50 {
            let incr = lanes.draw().to_vec();
            lanes.apply(&kernel);
            for (l, s) in scalar.iter_mut().enumerate() {
                let v: Vec<f64> = incr.iter().map(|c| c[l]).collect();
                stream.advance(s, cfg.dt, &v);
            }
        }
        for (l, s) in scalar.iter().enumerate() {
            assert!(lanes.lane(l, shape).max_abs_diff(s) < 1e-14);
        }
    }
}
