use super::batch::{BatchKernel, BrownianLanes, Lane, Workspace, LANES};
use super::sim::SimConfig;
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::Shape;
use rayon::prelude::*;
use serde::Serialize;

/// Mean-square gap between a burned-in and a flat-past signature driven by the same increments.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub mean_sq_gap: Vec<f64>,
    /// Times entering the exponential fit.
    pub fit_window: (f64, f64),
    pub fitted_rate: f64,
    pub expected_rate: f64,
    /// Slope of `log gap² + 2·min λ·t` over the whole window, with its standard error.
    pub excess_slope: f64,
    pub excess_slope_se: f64,
}

/// Least-squares slope and its standard error.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, intercept, se)
}

/// Runs the coupling over `[t0, t1]`, the burned-in copy having started at `t0 − burn_in`.
/// The rate is fitted on the second half of the window.
pub fn ergodic_decay_experiment(cfg: &SimConfig, r: &Rates, order: usize, n_paths: usize) -> Result<DecayReport> {
    cfg.validate()?;
    if r.width() != cfg.d + 1 {
        return Err(Error::AlphabetMismatch(r.width(), cfg.d + 1));
    }
    let shape = Shape::new(cfg.d + 1, order)?;
    let kernel = BatchKernel::new(r, shape, cfg.dt)?;
    let (k_start, k_end) = cfg.steps();
    let k0 = cfg.origin_step();
    let total = (k_end - k0) as usize;
    let stride = (total / 200).max(1);
    let records: Vec<usize> = (0..=total).step_by(stride).collect();
    let batches = n_paths.div_ceil(LANES);
    let partial: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut past = BrownianLanes::new(cfg, shape, (b * LANES) as u64, n_paths as u64, k_start);
            for _ in k_start..k0 {
                past.step(&kernel);
            }
            let mut flat: Vec<Lane> = vec![[0.0; LANES]; shape.len()];
            flat[0] = [1.0; LANES];
            let mut work = Workspace::new(shape);
            let mut out = Vec::with_capacity(records.len());
            let mut next = 0;
            for step in 0..=total {
                if records.get(next) == Some(&step) {
                    let mut s = 0.0;
                    for l in 0..past.active {
                        s += past.sig.iter().zip(&flat).map(|(a, b)| (a[l] - b[l]).powi(2)).sum::<f64>();
                    }
                    out.push(s);
                    next += 1;
                }
                if step == total {
                    break;
                }
                let incr = past.draw().to_vec();
                past.apply(&kernel);
                kernel.step(&mut flat, &incr, &mut work);
            }
            out
        })
        .collect();
    let mut sums = vec![0.0; records.len()];
    for p in &partial {
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v;
        }
    }
    let times: Vec<f64> = records.iter().map(|&s| cfg.time(k0 + s as i64)).collect();
    let mean_sq_gap: Vec<f64> = sums.iter().map(|s| s / n_paths as f64).collect();
    let half = times[0] + 0.5 * (times[times.len() - 1] - times[0]);
    let idx: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= half && mean_sq_gap[i] > 0.0).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| mean_sq_gap[i].ln()).collect();
    let (slope, _, _) = if xs.len() >= 2 { fit_line(&xs, &ys) } else { (f64::NAN, 0.0, f64::NAN) };
    let expected_rate = 2.0 * r.min();
    let all: Vec<usize> = (0..times.len()).filter(|&i| mean_sq_gap[i] > 0.0).collect();
    let xa: Vec<f64> = all.iter().map(|&i| times[i]).collect();
    let ya: Vec<f64> = all.iter().map(|&i| mean_sq_gap[i].ln() + expected_rate * times[i]).collect();
    let (excess_slope, _, excess_slope_se) = if xa.len() >= 2 { fit_line(&xa, &ya) } else { (f64::NAN, 0.0, f64::NAN) };
    Ok(DecayReport {
        fit_window: (xs.first().copied().unwrap_or(half), xs.last().copied().unwrap_or(half)),
        times,
        mean_sq_gap,
        fitted_rate: -slope,
        expected_rate,
        excess_slope,
        excess_slope_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (s, i, se) = fit_line(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (i - 1.0).abs() < 1e-14 && se.abs() < 1e-7);
    }

    #[test]
    fn start_gap_is_deterministic_norm() {
        let r = Rates::new(vec![2.0, 2.0]).unwrap();
        let cfg = SimConfig::new(1, 0.01, 0.0, 1.0, 1, 0.0).unwrap();
        let rep = ergodic_decay_experiment(&cfg, &r, 2, 16).unwrap();
        assert!(rep.mean_sq_gap.iter().all(|&g| g == 0.0));
        assert!(rep.fitted_rate.is_nan());
        let cfg = SimConfig::new(1, 0.01, 0.0, 3.0, 1, 3.0).unwrap();
        let rep = ergodic_decay_experiment(&cfg, &r, 2, 32).unwrap();
        assert!(rep.mean_sq_gap[0] > 0.0);
        assert!(rep.mean_sq_gap.last().unwrap() < &rep.mean_sq_gap[0]);
    }
}
