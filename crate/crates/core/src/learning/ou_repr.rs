use crate::error::{Error, Result};
use crate::lab::{BmIncrements, SimConfig};
use crate::rates::Rates;
use crate::efm::SegmentKernel;
use crate::tensor::{Shape, TensorSeq, Word};
use rayon::prelude::*;
use serde::Serialize;

/// `c₀ = 1`, `c_{k+1} = (kλ⁰ + λ¹ − μ)c_k` for `k = 0..=n`; returns `n + 2` values.
pub fn ou_coefficients(r: &Rates, mu: f64, n: usize) -> Result<Vec<f64>> {
    if r.width() != 2 {
        return Err(Error::InvalidArgument(format!("expected rates (λ⁰, λ¹), got {} entries", r.width())));
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    let (l0, l1) = (r.lambda()[0], r.lambda()[1]);
    let mut c = vec![1.0];
    for k in 0..=n {
        c.push((k as f64 * l0 + l1 - mu) * c[k]);
    }
    Ok(c)
}

/// `"1"` followed by `k` zeros.
pub fn ou_word(k: usize) -> Word {
    let mut v = vec![1u8];
    v.extend(std::iter::repeat_n(0u8, k));
    Word::new(&v)
}

/// `ℓ^{μ,N} = Σ_{k≤N} c_k · 1 0^k`, stored at order `N + 1`.
pub fn ou_representation(r: &Rates, mu: f64, n: usize) -> Result<TensorSeq> {
    let c = ou_coefficients(r, mu, n)?;
    let shape = Shape::new(2, n + 1)?;
    let mut ell = TensorSeq::zeros(shape);
    for (k, ck) in c.iter().take(n + 1).enumerate() {
        ell.set(&ou_word(k), *ck)?;
    }
    Ok(ell)
}

#[derive(Clone, Debug, Serialize)]
pub struct OuApproxError {
    pub order: usize,
    /// `E[(Y − Y^N)²] / Var(Y)`.
    pub relative_mse: f64,
    pub stderr: f64,
}

/// Coordinates `1 0^k`, `k ≤ n`, of the time-augmented EFM-signature; they form a closed
/// subsystem under the Chen update, so only `n + 1` values are carried.
struct OuCoordinates {
    disc: Vec<f64>,
    clock: Vec<f64>,
    spatial: Vec<f64>,
}

impl OuCoordinates {
    fn new(r: &Rates, n: usize, dt: f64) -> Result<Self> {
        let shape = Shape::new(2, n + 1)?;
        let kernel = SegmentKernel::new(r, shape)?;
        let g = kernel.weights(dt);
        let rates = kernel.table().rates();
        let mut disc = vec![];
        let mut clock = vec![];
        let mut spatial = vec![];
        for k in 0..=n {
            let i = shape.index(&ou_word(k))?;
            disc.push((-rates[i] * dt).exp());
            spatial.push(g[i] * dt.powi(k as i32));
            clock.push(g[shape.index(&Word::new(&vec![0u8; k]))?] * dt.powi(k as i32));
        }
        Ok(OuCoordinates { disc, clock, spatial })
    }

    /// `z ← D z ⊗ seg` restricted to the words `1 0^k`.
    fn step(&self, z: &mut [f64], dw: f64) {
        for k in (0..z.len()).rev() {
            let mut v = self.spatial[k] * dw;
            for j in 0..=k {
                v += self.disc[j] * z[j] * self.clock[k - j];
            }
            z[k] = v;
        }
    }
}

/// Monte Carlo error of `⟨sig_t, ℓ^{μ,N}⟩` against the OU process `Y`, both driven by the same
/// piecewise-linear Brownian path and started at zero at `t0 − burn_in`. Samples every `stride` steps in `[t0, t1]`.
pub fn ou_representation_mc(cfg: &SimConfig, r: &Rates, mu: f64, orders: &[usize], n_paths: usize, stride: usize) -> Result<Vec<OuApproxError>> {
    cfg.validate()?;
    if cfg.d != 1 {
        return Err(Error::InvalidArgument("OU representation needs d = 1".into()));
    }
    let n = orders.iter().copied().max().unwrap_or(0);
    let c = ou_coefficients(r, mu, n)?;
    let coords = OuCoordinates::new(r, n, cfg.dt)?;
    let (ka, kb) = cfg.steps();
    let k0 = cfg.origin_step();
    let ydisc = (-mu * cfg.dt).exp();
    let ygain = -(-mu * cfg.dt).exp_m1() / (mu * cfg.dt);
    let stride = stride.max(1);
    // per path: Σ Y², and per order Σ e, Σ e², sample count
    let per_path: Vec<(f64, Vec<f64>, Vec<f64>, usize)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut inc = BmIncrements::new(cfg, p, ka);
            let mut z = vec![0.0; n + 1];
            let mut y = 0.0;
            let mut dw = [0.0];
            let (mut sy, mut se, mut se2, mut m) = (0.0, vec![0.0; orders.len()], vec![0.0; orders.len()], 0);
            for k in ka..kb {
                inc.next_into(&mut dw);
                y = ydisc * y + ygain * dw[0];
                coords.step(&mut z, dw[0]);
                let kk = k + 1;
                if kk >= k0 && ((kk - k0) as usize).is_multiple_of(stride) {
                    sy += y * y;
                    for (o, &order) in orders.iter().enumerate() {
                        let yn: f64 = (0..=order).map(|j| c[j] * z[j]).sum();
                        let e = (y - yn).powi(2);
                        se[o] += e;
                        se2[o] += e * e;
                    }
                    m += 1;
                }
            }
            (sy, se, se2, m)
        })
        .collect();
    let mut sy = 0.0;
    let mut se = vec![0.0; orders.len()];
    let mut m = 0usize;
    let mut path_means: Vec<Vec<f64>> = vec![vec![]; orders.len()];
    for (a, b, _, cnt) in &per_path {
        sy += a;
        m += cnt;
        for o in 0..orders.len() {
            se[o] += b[o];
            path_means[o].push(b[o] / *cnt as f64);
        }
    }
    let var_y = sy / m as f64;
    Ok(orders
        .iter()
        .enumerate()
        .map(|(o, &order)| {
            // samples along one path are correlated; the spread of per-path means gives the error bar
            let pm = &path_means[o];
            let mean = pm.iter().sum::<f64>() / pm.len() as f64;
            let var = pm.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (pm.len() as f64 - 1.0).max(1.0);
            OuApproxError { order, relative_mse: se[o] / m as f64 / var_y, stderr: (var / pm.len() as f64).sqrt() / var_y }
        })
        .collect())
}
