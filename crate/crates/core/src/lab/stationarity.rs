use super::batch::{BatchKernel, BrownianLanes, LANES};
use super::sim::SimConfig;
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::Shape;
use serde::Serialize;

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample statistic.
pub fn ks_p_value(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let x = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if x < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct WordTest {
    pub word: String,
    /// `false` for coefficients that do not depend on the noise (pure clock words).
    pub stochastic: bool,
    pub statistic: f64,
    pub p_value: f64,
    pub rejected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StationarityReport {
    pub t_a: f64,
    pub t_b: f64,
    pub n_paths: usize,
    pub threshold: f64,
    pub tests: Vec<WordTest>,
    pub rejections: usize,
}

/// Compares the laws of level-1 and level-2 coefficients at `t_a` and `t_b` across paths
/// started from ø at `t0 − burn_in`. Clock-only words are deterministic and are compared
/// directly against the burn-in emulation error `n·e^{−min λ·s}·|value|` (`s` the elapsed time)
/// instead of by KS. Rejection at level 0.01 with Bonferroni correction; the same paths
/// are used at both times, which makes the KS p-value conservative.
pub fn stationarity_check(cfg: &SimConfig, r: &Rates, order: usize, n_paths: usize, t_a: f64, t_b: f64) -> Result<StationarityReport> {
    cfg.validate()?;
    if r.width() != cfg.d + 1 {
        return Err(Error::AlphabetMismatch(r.width(), cfg.d + 1));
    }
    let levels = order.min(2);
    let shape = Shape::new(cfg.d + 1, levels)?;
    let kernel = BatchKernel::new(r, shape, cfg.dt)?;
    let (k_start, _) = cfg.steps();
    let ka = ((t_a / cfg.dt).round() as i64 - k_start).max(0) as usize;
    let kb = ((t_b / cfg.dt).round() as i64 - k_start).max(0) as usize;
    let last = ka.max(kb);
    let mut at_a = vec![Vec::with_capacity(n_paths); shape.len()];
    let mut at_b = vec![Vec::with_capacity(n_paths); shape.len()];
    for b in 0..n_paths.div_ceil(LANES) {
        let mut lanes = BrownianLanes::new(cfg, shape, (b * LANES) as u64, n_paths as u64, k_start);
        for step in 0..=last {
            for (k, store) in [(ka, &mut at_a), (kb, &mut at_b)] {
                if step == k {
                    for (i, c) in lanes.sig.iter().enumerate() {
                        store[i].extend_from_slice(&c[..lanes.active]);
                    }
                }
            }
            if step < last {
                lanes.step(&kernel);
            }
        }
    }
    let tested: Vec<usize> = (1..shape.len()).collect();
    let threshold = 0.01 / tested.len() as f64;
    let elapsed = (ka.min(kb) as f64) * cfg.dt;
    let mut tests = Vec::new();
    for &i in &tested {
        let word = shape.word(i);
        let stochastic = word.letters().iter().any(|&l| l != 0);
        let (a, b) = (&at_a[i], &at_b[i]);
        let (statistic, p_value) = if stochastic {
            let d = ks_statistic(a, b);
            (d, ks_p_value(d, a.len(), b.len()))
        } else {
            let gap = (a[0] - b[0]).abs();
            let tol = word.len() as f64 * (-r.min() * elapsed).exp() * a[0].abs().max(b[0].abs()) + 1e-12;
            (gap, if gap <= tol { 1.0 } else { 0.0 })
        };
        tests.push(WordTest { word: word.to_string(), stochastic, statistic, p_value, rejected: p_value < threshold });
    }
    let rejections = tests.iter().filter(|t| t.rejected).count();
    Ok(StationarityReport { t_a, t_b, n_paths, threshold, tests, rejections })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_basics() {
        let a = [0.1, 0.2, 0.3];
        assert_eq!(ks_statistic(&a, &a), 0.0);
        assert_eq!(ks_statistic(&[0.0, 0.1], &[1.0, 2.0]), 1.0);
        assert!(ks_p_value(0.0, 100, 100) > 0.99);
        assert!(ks_p_value(0.5, 200, 200) < 1e-10);
        // 95% critical value c(α) = 1.358
        let d = 1.358 / (50.0f64).sqrt();
        assert!((ks_p_value(d, 100, 100) - 0.05).abs() < 0.01);
    }

    #[test]
    fn equal_times_give_zero_statistic() {
        let r = Rates::new(vec![1.0, 1.0]).unwrap();
        let cfg = SimConfig::new(2, 0.02, 0.0, 1.0, 1, 10.0).unwrap();
        let rep = stationarity_check(&cfg, &r, 2, 64, 0.5, 0.5).unwrap();
        assert!(rep.tests.iter().all(|t| t.statistic == 0.0));
        assert_eq!(rep.rejections, 0);
    }
}
