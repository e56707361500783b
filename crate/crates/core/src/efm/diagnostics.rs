use super::{EfmStream, PiecewisePath};
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq};
use serde::Serialize;

/// Gap between two signatures whose paths share increments after a split time.
#[derive(Clone, Debug, Serialize)]
pub struct FadingGap {
    /// `‖sig_a(T) − sig_b(T)‖₂`.
    pub gap: f64,
    /// `‖sig_a(split) − sig_b(split)‖₂`.
    pub gap_at_split: f64,
    /// `‖sig(split, T)‖₂` of the shared tail.
    pub tail_norm: f64,
    /// `e^{−min λ (T − split)}·gap_at_split·tail_norm`.
    pub bound: f64,
}

fn shared_tail(a: &PiecewisePath, b: &PiecewisePath, split: f64) -> Result<(usize, usize)> {
    let ka = a.breakpoint(split).ok_or(Error::PathsDiffer(split))?;
    let kb = b.breakpoint(split).ok_or(Error::PathsDiffer(split))?;
    if a.len() - ka != b.len() - kb || a.width() != b.width() || a.is_time_augmented() != b.is_time_augmented() {
        return Err(Error::PathsDiffer(split));
    }
    for j in 0..a.len() - ka - 1 {
        let (ia, ib) = (a.increment(ka + j), b.increment(kb + j));
        let same_time = a.times()[ka + j + 1] == b.times()[kb + j + 1];
        if !same_time || ia.iter().zip(&ib).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(Error::PathsDiffer(split));
        }
    }
    Ok((ka, kb))
}

/// Signature gap at the common end time of two paths that agree (in increments) after `split`.
pub fn fading_memory_gap(r: &Rates, a: &PiecewisePath, b: &PiecewisePath, split: f64, order: usize) -> Result<FadingGap> {
    let (ka, kb) = shared_tail(a, b, split)?;
    let shape = Shape::new(a.width(), order)?;
    let mut stream = EfmStream::new(r, shape)?;
    let mut sa = TensorSeq::unit(shape);
    let mut sb = TensorSeq::unit(shape);
    stream.fold(&mut sa, a, 0, ka);
    stream.fold(&mut sb, b, 0, kb);
    let gap_at_split = sa.sub(&sb)?.norm_l2();
    let mut tail = TensorSeq::unit(shape);
    stream.fold(&mut tail, a, ka, a.len() - 1);
    stream.fold(&mut sa, a, ka, a.len() - 1);
    stream.fold(&mut sb, b, kb, b.len() - 1);
    let elapsed = a.end() - split;
    let tail_norm = tail.norm_l2();
    Ok(FadingGap {
        gap: sa.sub(&sb)?.norm_l2(),
        gap_at_split,
        tail_norm,
        bound: (-r.min() * elapsed).exp() * gap_at_split * tail_norm,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BvLevel {
    pub level: usize,
    /// `|𝕏^n|`, the ℓ2 norm of level `n`.
    pub value: f64,
    /// `‖X‖^n_{BV,λ} / n!`.
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BvReport {
    /// `‖X‖_{BV,λ;[s,t]} = ∫ |D_{t−u} Ẋ_u| du`.
    pub variation: f64,
    pub levels: Vec<BvLevel>,
    pub holds: bool,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Weighted variation of a piecewise-linear path, measured at its end time.
pub fn bv_lambda_norm(r: &Rates, path: &PiecewisePath) -> f64 {
    let lam = r.lambda();
    let end = path.end();
    let nodes = gauss_legendre(12);
    let mut total = 0.0;
    for k in 0..path.len() - 1 {
        let slope = path.slope(k);
        let (t0, t1) = (path.times()[k], path.times()[k + 1]);
        let active: Vec<usize> = (0..slope.len()).filter(|&i| slope[i] != 0.0).collect();
        if active.is_empty() {
            continue;
        }
        let l0 = lam[active[0]];
        if active.iter().all(|&i| lam[i] == l0) {
            let speed = active.iter().map(|&i| slope[i] * slope[i]).sum::<f64>().sqrt();
            total += speed * (-l0 * (end - t1)).exp() * crate::rates::c_factor(l0, t1 - t0);
            continue;
        }
        let lmax = active.iter().map(|&i| lam[i]).fold(0.0, f64::max);
        let pieces = ((lmax * (t1 - t0)) / 0.25).ceil().max(1.0) as usize;
        let h = (t1 - t0) / pieces as f64;
        for p in 0..pieces {
            let (a, b) = (t0 + p as f64 * h, t0 + (p + 1) as f64 * h);
            for &(x, wgt) in &nodes {
                let u = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let s2: f64 = active.iter().map(|&i| ((-lam[i] * (end - u)).exp() * slope[i]).powi(2)).sum();
                total += 0.5 * (b - a) * wgt * s2.sqrt();
            }
        }
    }
    total
}

/// Compares each level of the signature with `‖X‖^n_{BV,λ}/n!`.
pub fn bv_bound_check(r: &Rates, path: &PiecewisePath, order: usize) -> Result<BvReport> {
    let sig = super::signature_of_path(r, path, order, super::Origin::Start)?.sig;
    let variation = bv_lambda_norm(r, path);
    let mut levels = Vec::new();
    let mut bound = 1.0;
    for n in 1..=order {
        bound *= variation / n as f64;
        let value = sig.level_norm_l2(n);
        levels.push(BvLevel { level: n, value, bound, margin: bound - value });
    }
    let holds = levels.iter().all(|l| l.margin >= -1e-12 * l.bound.max(1e-300));
    Ok(BvReport { variation, levels, holds })
}
