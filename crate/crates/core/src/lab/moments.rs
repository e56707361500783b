use super::batch::{BatchKernel, BrownianLanes, LANES};
use super::sim::SimConfig;
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq};
use rayon::prelude::*;

/// Empirical mean and standard error of the flat-past signature at a horizon.
#[derive(Clone, Debug)]
pub struct Moments {
    pub mean: TensorSeq,
    pub stderr: TensorSeq,
    pub n_paths: usize,
}

/// Runs `n_paths` time-augmented Brownian paths from ø at `t0` for `horizon` and
/// reduces per-batch sums in batch order, so the result does not depend on the thread count.
pub fn mc_signature_moments(cfg: &SimConfig, r: &Rates, order: usize, n_paths: usize, horizon: f64) -> Result<Moments> {
    cfg.validate()?;
    if n_paths < 2 {
        return Err(Error::InvalidArgument("need at least two paths".into()));
    }
    if r.width() != cfg.d + 1 {
        return Err(Error::AlphabetMismatch(r.width(), cfg.d + 1));
    }
    let shape = Shape::new(cfg.d + 1, order)?;
    let kernel = BatchKernel::new(r, shape, cfg.dt)?;
    let steps = (horizon / cfg.dt).round() as usize;
    let k0 = cfg.origin_step();
    let batches = n_paths.div_ceil(LANES);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut lanes = BrownianLanes::new(cfg, shape, (b * LANES) as u64, n_paths as u64, k0);
            for _ in 0..steps {
                lanes.step(&kernel);
            }
            let mut s1 = vec![0.0; shape.len()];
            let mut s2 = vec![0.0; shape.len()];
            for (i, c) in lanes.sig.iter().enumerate() {
                for v in &c[..lanes.active] {
                    s1[i] += v;
                    s2[i] += v * v;
                }
            }
            (s1, s2)
        })
        .collect();
    let mut s1 = vec![0.0; shape.len()];
    let mut s2 = vec![0.0; shape.len()];
    for (a, b) in &partial {
        for i in 0..shape.len() {
            s1[i] += a[i];
            s2[i] += b[i];
        }
    }
    let n = n_paths as f64;
    let mean: Vec<f64> = s1.iter().map(|s| s / n).collect();
    let stderr: Vec<f64> = s2
        .iter()
        .zip(&mean)
        .map(|(q, m)| ((q / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt())
        .collect();
    Ok(Moments { mean: TensorSeq::from_coeffs(shape, mean)?, stderr: TensorSeq::from_coeffs(shape, stderr)?, n_paths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Word;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_words_and_clock() {
        let r = Rates::new(vec![1.0, 0.5]).unwrap();
        let cfg = SimConfig::new(3, 0.01, 0.0, 1.0, 1, 0.0).unwrap();
        let m = mc_signature_moments(&cfg, &r, 3, 400, 4.0).unwrap();
        assert_relative_eq!(m.mean.get(&Word::letter(0)), -(-4.0f64).exp_m1(), epsilon = 1e-12);
        let shape = m.mean.shape();
        for i in 0..shape.len() {
            let w = shape.word(i);
            let spatial = w.letters().iter().filter(|&&l| l != 0).count();
            if spatial % 2 == 1 {
                assert!(m.mean.coeffs()[i].abs() < 4.0 * m.stderr.coeffs()[i] + 1e-15, "{w}");
            }
        }
    }
}
