use super::rng::{stream_id, NormalStream, Purpose};
use crate::efm::PiecewisePath;
use crate::error::{Error, Result};
use crate::rates::Rates;
use serde::{Deserialize, Serialize};

/// Grid positions are shifted by this before addressing the normal stream, so negative steps are valid.
const STEP_OFFSET: i64 = 1 << 40;

/// Simulation window and discretization. The grid is `k·dt`; the window
/// `[t0 − burn_in, t1]` is snapped to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub d: usize,
    pub burn_in: f64,
}

impl SimConfig {
    pub fn new(seed: u64, dt: f64, t0: f64, t1: f64, d: usize, burn_in: f64) -> Result<Self> {
        let c = SimConfig { seed, dt, t0, t1, d, burn_in };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t1 > self.t0) {
            return Err(Error::InvalidArgument(format!("empty window [{}, {}]", self.t0, self.t1)));
        }
        if !(self.burn_in >= 0.0 && self.burn_in.is_finite()) {
            return Err(Error::InvalidArgument(format!("burn-in must be nonnegative, got {}", self.burn_in)));
        }
        Ok(())
    }

    /// Burn-in emulating the infinite past, `10 / min λ`.
    pub fn default_burn_in(r: &Rates) -> f64 {
        10.0 / r.min()
    }

    /// First and last grid index of the window, burn-in included.
    pub fn steps(&self) -> (i64, i64) {
        let a = ((self.t0 - self.burn_in) / self.dt).round() as i64;
        let b = (self.t1 / self.dt).round() as i64;
        (a, b.max(a + 1))
    }

    /// Grid index of `t0` (the end of the burn-in).
    pub fn origin_step(&self) -> i64 {
        (self.t0 / self.dt).round() as i64
    }

    pub fn time(&self, k: i64) -> f64 {
        k as f64 * self.dt
    }
}

/// Brownian increments of one path, addressed by grid index.
pub struct BmIncrements {
    normals: NormalStream,
    d: usize,
    sqrt_dt: f64,
}

impl BmIncrements {
    /// Increments of path `path` starting with the step `[k·dt, (k+1)·dt]`.
    pub fn new(cfg: &SimConfig, path: u64, k: i64) -> Self {
        let mut normals = NormalStream::new(cfg.seed, stream_id(path, Purpose::Increments));
        normals.seek((k + STEP_OFFSET) as u128 * cfg.d as u128);
        BmIncrements { normals, d: cfg.d, sqrt_dt: cfg.dt.sqrt() }
    }

    /// Next step's increments, `d` values.
    #[inline]
    pub fn next_into(&mut self, out: &mut [f64]) {
        for o in out[..self.d].iter_mut() {
            *o = self.sqrt_dt * self.normals.next();
        }
    }
}

fn grid_times(cfg: &SimConfig) -> Vec<f64> {
    let (a, b) = cfg.steps();
    (a..=b).map(|k| cfg.time(k)).collect()
}

/// Brownian motion on the window, starting at zero, for path index `path`.
pub fn simulate_bm_path(cfg: &SimConfig, path: u64) -> Result<PiecewisePath> {
    cfg.validate()?;
    let (a, b) = cfg.steps();
    let mut inc = BmIncrements::new(cfg, path, a);
    let mut values = vec![0.0; cfg.d];
    let mut dw = vec![0.0; cfg.d];
    for k in a..b {
        inc.next_into(&mut dw);
        let base = ((k - a) as usize) * cfg.d;
        for i in 0..cfg.d {
            let v = values[base + i] + dw[i];
            values.push(v);
        }
    }
    PiecewisePath::from_flat(grid_times(cfg), cfg.d, values, false)
}

/// Brownian motion on the window for path 0.
pub fn simulate_bm(cfg: &SimConfig) -> Result<PiecewisePath> {
    simulate_bm_path(cfg, 0)
}

/// Exact OU recursion `Y ← e^{−μΔ}Y + √((1−e^{−2μΔ})/(2μ))·Z`, each `Z` the normalized Brownian increment of the same path.
pub fn simulate_ou_path(cfg: &SimConfig, mu: f64, from_stationary: bool, path: u64) -> Result<PiecewisePath> {
    cfg.validate()?;
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    let (a, b) = cfg.steps();
    let decay = (-mu * cfg.dt).exp();
    let scale = (-(-2.0 * mu * cfg.dt).exp_m1() / (2.0 * mu)).sqrt() / cfg.dt.sqrt();
    let mut y = vec![0.0f64; cfg.d];
    if from_stationary {
        let mut init = NormalStream::new(cfg.seed, stream_id(path, Purpose::Initial));
        let sd = (0.5 / mu).sqrt();
        y.iter_mut().for_each(|v| *v = sd * init.next());
    }
    let mut inc = BmIncrements::new(cfg, path, a);
    let mut values = y.clone();
    let mut dw = vec![0.0; cfg.d];
    for _ in a..b {
        inc.next_into(&mut dw);
        for i in 0..cfg.d {
            y[i] = decay * y[i] + scale * dw[i];
        }
        values.extend_from_slice(&y);
    }
    PiecewisePath::from_flat(grid_times(cfg), cfg.d, values, false)
}

pub fn simulate_ou(cfg: &SimConfig, mu: f64, from_stationary: bool) -> Result<PiecewisePath> {
    simulate_ou_path(cfg, mu, from_stationary, 0)
}

/// Euler–Maruyama for `dY = −μ Y^p dt + dW`, started at zero, returned with its driver `W`.
pub fn simulate_langevin_with_driver(cfg: &SimConfig, mu: f64, p: u32, path: u64) -> Result<(PiecewisePath, PiecewisePath)> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    if p.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("power p = {p} must be odd")));
    }
    let w = simulate_bm_path(cfg, path)?;
    let mut y = vec![0.0f64; cfg.d];
    let mut values = y.clone();
    for k in 0..w.len() - 1 {
        let (w0, w1) = (w.value(k), w.value(k + 1));
        for i in 0..cfg.d {
            y[i] += -mu * y[i].powi(p as i32) * cfg.dt + (w1[i] - w0[i]);
            if !(y[i].abs() <= 1e6) {
                return Err(Error::Unstable(w.times()[k + 1]));
            }
        }
        values.extend_from_slice(&y);
    }
    let yp = PiecewisePath::from_flat(w.times().to_vec(), cfg.d, values, false)?;
    Ok((yp, w))
}

pub fn simulate_langevin(cfg: &SimConfig, mu: f64, p: u32) -> Result<PiecewisePath> {
    Ok(simulate_langevin_with_driver(cfg, mu, p, 0)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, dt: f64, t1: f64) -> SimConfig {
        SimConfig::new(seed, dt, 0.0, t1, 1, 0.0).unwrap()
    }

    #[test]
    fn determinism_and_windows() {
        let c = SimConfig::new(5, 0.01, 0.0, 2.0, 2, 1.0).unwrap();
        assert_eq!(simulate_bm(&c).unwrap(), simulate_bm(&c).unwrap());
        let long = simulate_bm(&c).unwrap();
        let sub = simulate_bm(&SimConfig { t0: 0.5, t1: 1.5, burn_in: 0.0, ..c.clone() }).unwrap();
        let k0 = long.breakpoint(0.5).unwrap();
        assert_eq!(sub.times()[0], 0.5);
        for j in 0..sub.len() - 1 {
            let (a, b) = (sub.increment(j), long.increment(k0 + j));
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        }
        assert!(SimConfig::new(1, 0.0, 0.0, 1.0, 1, 0.0).is_err());
        assert!(SimConfig::new(1, 0.1, 1.0, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn increment_variance() {
        let c = cfg(11, 1e-3, 100.0);
        let p = simulate_bm(&c).unwrap();
        let n = p.len() - 1;
        let v: f64 = (0..n).map(|k| p.increment(k)[0].powi(2)).sum::<f64>() / n as f64;
        let sd = c.dt * (2.0 / n as f64).sqrt();
        assert!((v - c.dt).abs() < 3.0 * sd, "{v}");
    }

    #[test]
    fn ou_stationary_law() {
        let mu = 2.0;
        let c = cfg(3, 0.05, 5000.0);
        let p = simulate_ou(&c, mu, true).unwrap();
        let xs: Vec<f64> = (0..p.len()).map(|k| p.value(k)[0]).collect();
        let n = xs.len() as f64;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / n;
        let lag = xs.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1.0);
        // effective sample size shrinks with autocorrelation
        let ess = n * (1.0 - (-mu * c.dt).exp()) / (1.0 + (-mu * c.dt).exp());
        assert!((var - 0.25).abs() < 3.0 * 0.25 * (2.0 / ess).sqrt(), "{var}");
        assert!((lag / var - (-mu * c.dt).exp()).abs() < 0.01);
    }

    #[test]
    fn langevin_linear_case_tracks_ou() {
        let c = cfg(8, 1e-3, 5.0);
        let (y, _) = simulate_langevin_with_driver(&c, 1.5, 1, 0).unwrap();
        let o = simulate_ou(&c, 1.5, false).unwrap();
        let err = (0..y.len()).map(|k| (y.value(k)[0] - o.value(k)[0]).abs()).fold(0.0, f64::max);
        let c2 = cfg(8, 5e-4, 5.0);
        let (y2, _) = simulate_langevin_with_driver(&c2, 1.5, 1, 0).unwrap();
        let o2 = simulate_ou(&c2, 1.5, false).unwrap();
        let err2 = (0..y2.len()).map(|k| (y2.value(k)[0] - o2.value(k)[0]).abs()).fold(0.0, f64::max);
        assert!(err < 5e-3, "{err}");
        assert!(err2 < 0.7 * err, "{err2} vs {err}");
        assert!(simulate_langevin(&c, 1.0, 2).is_err());
    }

    #[test]
    fn paper_scale_langevin_is_stable() {
        let c = SimConfig::new(1, 1.0 / 3650.0, 0.0, 4.0, 1, 1.0).unwrap();
        assert!(simulate_langevin(&c, 10.0, 5).is_ok());
        let bad = SimConfig::new(1, 0.5, 0.0, 50.0, 1, 0.0).unwrap();
        assert!(matches!(simulate_langevin(&bad, 10.0, 5), Err(Error::Unstable(_))));
    }
}
