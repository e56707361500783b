use super::batch::{BatchKernel, BrownianLanes, LANES};
use super::sim::SimConfig;
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::Shape;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct L2BoundReport {
    /// `sup_t E‖sig_{0,t}‖²` over the recorded times.
    pub empirical_sup: f64,
    pub argmax_time: f64,
    /// `C_λ = max(1, 1/(min λ)², 1/(2 min λ))`.
    pub c_lambda: f64,
    /// `Σ_{n≤N} 2^n (2C_λ)^n / n!`.
    pub bound: f64,
    /// Sum over words of the three-case per-word recursion. The `v''11` case drops the
    /// cross term of `E[(A + B)²]`, so this is an estimate, not a guaranteed bound.
    pub recursive_bound: f64,
    pub holds: bool,
}

pub fn c_lambda(r: &Rates) -> f64 {
    let m = r.min();
    1f64.max(1.0 / (m * m)).max(1.0 / (2.0 * m))
}

/// `Σ_{n≤N} 2^n (2C)^n / n!`.
pub fn explicit_bound(r: &Rates, order: usize) -> f64 {
    let c = c_lambda(r);
    let (mut term, mut sum) = (1.0, 1.0);
    for n in 1..=order {
        term *= 4.0 * c / n as f64;
        sum += term;
    }
    sum
}

/// Per-word recursion `b_v` for `d = 1`: `b_{v'0} = b_{v'}/(λ^v)²`, `b_{v'1} = b_{v'}/(2λ^v)`
/// when `v'` does not end in 1, `b_{v''11} = b_{v''1}/(2λ^v) + b_{v''}/(2λ^v)²`; summed over words.
/// Exact on `1` and `11`, but Monte Carlo second moments exceed it on words such as `111`.
pub fn recursive_bound(r: &Rates, order: usize) -> Result<f64> {
    let shape = Shape::new(2, order)?;
    let k = crate::efm::SegmentKernel::new(r, shape)?;
    let (parent, last, rates) = (k.parent(), k.last_letter(), k.table().rates());
    let mut b = vec![0.0; shape.len()];
    b[0] = 1.0;
    for i in 1..shape.len() {
        let (p, l) = (parent[i], rates[i]);
        b[i] = if last[i] == 0 {
            b[p] / (l * l)
        } else if i > 2 && last[p] == 1 {
            b[p] / (2.0 * l) + b[parent[p]] / (4.0 * l * l)
        } else {
            b[p] / (2.0 * l)
        };
    }
    Ok(b.iter().sum())
}

/// Monte Carlo `sup_t E‖sig_{0,t}‖²` for time-augmented one-dimensional Brownian motion on `[t0, t1]`.
pub fn l2_bound_check(cfg: &SimConfig, r: &Rates, order: usize, n_paths: usize) -> Result<L2BoundReport> {
    cfg.validate()?;
    if cfg.d != 1 || r.width() != 2 {
        return Err(Error::InvalidArgument("the L2 bound check covers d = 1 with a clock".into()));
    }
    let shape = Shape::new(2, order)?;
    let kernel = BatchKernel::new(r, shape, cfg.dt)?;
    let (_, k_end) = cfg.steps();
    let k0 = cfg.origin_step();
    let total = (k_end - k0) as usize;
    let stride = (total / 200).max(1);
    let n_rec = total / stride + 1;
    let partial: Vec<Vec<f64>> = (0..n_paths.div_ceil(LANES))
        .into_par_iter()
        .map(|b| {
            let mut lanes = BrownianLanes::new(cfg, shape, (b * LANES) as u64, n_paths as u64, k0);
            let mut out = vec![0.0; n_rec];
            for step in 0..=total {
                if step % stride == 0 {
                    out[step / stride] = lanes.sig.iter().map(|c| c[..lanes.active].iter().map(|v| v * v).sum::<f64>()).sum();
                }
                if step < total {
                    lanes.step(&kernel);
                }
            }
            out
        })
        .collect();
    let mut sums = vec![0.0; n_rec];
    for p in &partial {
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v;
        }
    }
    let (imax, smax) = sums.iter().enumerate().fold((0, f64::MIN), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    let empirical_sup = smax / n_paths as f64;
    let bound = explicit_bound(r, order);
    Ok(L2BoundReport {
        empirical_sup,
        argmax_time: cfg.time(k0 + (imax * stride) as i64),
        c_lambda: c_lambda(r),
        bound,
        recursive_bound: recursive_bound(r, order)?,
        holds: empirical_sup <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants() {
        let r = Rates::new(vec![1.0, 0.5]).unwrap();
        assert_eq!(c_lambda(&r), 4.0);
        assert_relative_eq!(explicit_bound(&r, 2), 1.0 + 16.0 + 128.0, epsilon = 1e-12);
        let big = Rates::new(vec![4.0, 4.0]).unwrap();
        assert_eq!(c_lambda(&big), 1.0);
    }

    #[test]
    fn first_level_and_clock_words() {
        let r = Rates::new(vec![2.0, 1.5]).unwrap();
        // the clock word 0^n at stationarity is Π 1/(kλ⁰), its square sits below the bound
        let mut v = 1.0;
        for k in 1..=4 {
            v /= k as f64 * 2.0;
            assert!(v * v <= explicit_bound(&r, 4));
        }
        let cfg = SimConfig::new(4, 0.01, 0.0, 4.0, 1, 0.0).unwrap();
        let rep = l2_bound_check(&cfg, &r, 1, 2000).unwrap();
        assert!(rep.holds);
        // E‖sig‖² at order 1 = 1 + E[(sig^0)²] + E[(sig^1)²] → 1 + 1/λ⁰² + 1/(2λ¹)
        let limit = 1.0 + 0.25 + 1.0 / 3.0;
        assert!((rep.empirical_sup - limit).abs() < 0.05, "{}", rep.empirical_sup);
    }
}
