use super::elastic_net::{coordinate_descent, Gram};
use crate::efm::{signature_trajectory, PiecewisePath};
use crate::error::{Error, Result};
use crate::lab::{simulate_langevin_with_driver, SimConfig};
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Feature process of the regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Plain signature of `(t, W_t)` started at 0.
    SigBm,
    /// Plain signature of `(t, U_t)`, `U` a stationary OU process driven by `W`.
    SigOu,
    /// EFM-signature of `(t, W_t)` over the whole past.
    EfmSig,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::SigBm, Model::SigOu, Model::EfmSig];
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::SigBm => "sig_bm",
            Model::SigOu => "sig_ou",
            Model::EfmSig => "efm_sig",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sig_bm" => Ok(Model::SigBm),
            "sig_ou" => Ok(Model::SigOu),
            "efm_sig" => Ok(Model::EfmSig),
            _ => Err(Error::Parse(format!("unknown model {s:?}, expected sig_bm, sig_ou or efm_sig"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperGrid {
    pub alphas: Vec<f64>,
    pub omegas: Vec<f64>,
    /// OU rate for `sig_ou`; each of `λ⁰`, `λ¹` for `efm_sig`.
    pub lambdas: Vec<f64>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            alphas: (0..6).map(|k| 10f64.powi(k - 6)).collect(),
            omegas: vec![0.0, 0.5, 1.0],
            lambdas: vec![1.0, 3.0, 10.0],
        }
    }
}

/// Train on `[0, train]`, select on `[0, select]`, test on `(select, test]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Split {
    pub train: f64,
    pub select: f64,
    pub test: f64,
}

impl Default for Split {
    fn default() -> Self {
        Split { train: 1.0, select: 2.0, test: 4.0 }
    }
}

impl Split {
    fn validate(&self) -> Result<()> {
        if !(0.0 < self.train && self.train <= self.select && self.select < self.test) {
            return Err(Error::InvalidArgument(format!("split must satisfy 0 < train <= select < test, got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegressionMetrics {
    pub model: Model,
    pub order: usize,
    pub alpha: f64,
    pub omega: f64,
    pub lambda: Option<Vec<f64>>,
    pub train_mse: f64,
    pub select_mse: f64,
    pub test_mse: f64,
    pub n_train: usize,
    pub n_test: usize,
    #[serde(skip)]
    pub ell: TensorSeq,
}

/// Stationary OU with rate `lambda` driven by the piecewise-linear `w`, started at 0 at the first sample.
fn ou_from_driver(w: &PiecewisePath, lambda: f64) -> Vec<f64> {
    let mut u = vec![0.0];
    for k in 0..w.len() - 1 {
        let dt = w.times()[k + 1] - w.times()[k];
        let dw = w.value(k + 1)[0] - w.value(k)[0];
        let prev = u[k];
        u.push((-lambda * dt).exp() * prev - (-lambda * dt).exp_m1() / (lambda * dt) * dw);
    }
    u
}

/// Feature rows for the samples of `driver` with `t >= 0`.
fn features(model: Model, lambda: Option<&[f64]>, driver: &PiecewisePath, order: usize) -> Result<Vec<Vec<f64>>> {
    let first = driver.times().iter().position(|&t| t >= 0.0).ok_or(Error::EmptyPath)?;
    let times = driver.times()[first..].to_vec();
    let sigs = match model {
        Model::SigBm => {
            let vals = driver.flat_values()[first..].to_vec();
            let p = PiecewisePath::from_flat(times, 1, vals, true)?;
            signature_trajectory(&Rates::plain(2), &p, order)?
        }
        Model::SigOu => {
            let l = lambda.ok_or_else(|| Error::InvalidArgument("sig_ou needs an OU rate".into()))?[0];
            let u = ou_from_driver(driver, l);
            let p = PiecewisePath::from_flat(times, 1, u[first..].to_vec(), true)?;
            signature_trajectory(&Rates::plain(2), &p, order)?
        }
        Model::EfmSig => {
            let l = lambda.ok_or_else(|| Error::InvalidArgument("efm_sig needs rates".into()))?;
            let p = driver.clone().with_time_augmentation(true);
            let all = signature_trajectory(&Rates::new(l.to_vec())?, &p, order)?;
            all.into_iter().skip(first).collect()
        }
    };
    Ok(sigs.into_iter().map(|s| s.into_coeffs()).collect())
}

fn mse(rows: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    let s: f64 = rows.iter().zip(y).map(|(r, t)| (r.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>() - t).powi(2)).sum();
    s / rows.len() as f64
}

fn lambda_options(model: Model, grid: &HyperGrid) -> Vec<Option<Vec<f64>>> {
    match model {
        Model::SigBm => vec![None],
        Model::SigOu => grid.lambdas.iter().map(|&l| Some(vec![l])).collect(),
        Model::EfmSig => grid.lambdas.iter().flat_map(|&a| grid.lambdas.iter().map(move |&b| Some(vec![a, b]))).collect(),
    }
}

struct Candidate {
    lambda: Option<Vec<f64>>,
    alpha: f64,
    omega: f64,
    beta: Vec<f64>,
    train: f64,
    select: f64,
    test: f64,
}

/// Fits `model` on `signal` (the target, one column) with features built from `driver`.
/// Both share the time grid; the driver may start before 0 to carry the past.
pub fn run_regression_on_data(signal: &PiecewisePath, driver: &PiecewisePath, model: Model, order: usize, grid: &HyperGrid, split: Split) -> Result<RegressionMetrics> {
    split.validate()?;
    if driver.dim() != 1 || signal.dim() != 1 {
        return Err(Error::InvalidArgument("signal and driver must be one-dimensional".into()));
    }
    if signal.times() != driver.times() {
        return Err(Error::InvalidArgument("signal and driver must share the time grid".into()));
    }
    if grid.alphas.is_empty() || grid.omegas.is_empty() || (model != Model::SigBm && grid.lambdas.is_empty()) {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }
    let shape = Shape::new(2, order)?;
    let first = driver.times().iter().position(|&t| t >= 0.0).ok_or(Error::EmptyPath)?;
    let times = &driver.times()[first..];
    let y: Vec<f64> = (first..signal.len()).map(|k| signal.value(k)[0]).collect();
    // grid times are k·dt, allow for rounding at the split points
    let eps = 1e-9 * (driver.times()[1] - driver.times()[0]);
    let count = |end: f64| times.iter().filter(|&&t| t <= end + eps).count();
    let (n_train, n_select, n_end) = (count(split.train), count(split.select), count(split.test));
    if n_train < 2 || n_end <= n_select {
        return Err(Error::InvalidArgument("split leaves an empty train or test set".into()));
    }
    let mut alphas = grid.alphas.clone();
    alphas.sort_by(|a, b| b.total_cmp(a));
    let per_lambda: Vec<Vec<Candidate>> = lambda_options(model, grid)
        .into_par_iter()
        .map(|lam| -> Result<Vec<Candidate>> {
            let rows = features(model, lam.as_deref(), driver, order)?;
            let gram = Gram::new(&rows[..n_train], &y[..n_train])?;
            let mut out = vec![];
            for &omega in &grid.omegas {
                let mut warm: Option<Vec<f64>> = None;
                for &alpha in &alphas {
                    let fit = coordinate_descent(&gram, alpha, omega, warm.as_deref())?;
                    out.push(Candidate {
                        lambda: lam.clone(),
                        alpha,
                        omega,
                        train: mse(&rows[..n_train], &y[..n_train], &fit.beta),
                        select: mse(&rows[..n_select], &y[..n_select], &fit.beta),
                        test: mse(&rows[n_select..n_end], &y[n_select..n_end], &fit.beta),
                        beta: fit.beta.clone(),
                    });
                    warm = Some(fit.beta);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let best = per_lambda
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.select < a.select { b } else { a })
        .expect("nonempty grid");
    Ok(RegressionMetrics {
        model,
        order,
        alpha: best.alpha,
        omega: best.omega,
        lambda: best.lambda,
        train_mse: best.train,
        select_mse: best.select,
        test_mse: best.test,
        n_train,
        n_test: n_end - n_select,
        ell: TensorSeq::from_coeffs(shape, best.beta)?,
    })
}

/// Simulates the Langevin target `dY = −μY^p dt + dW` on `cfg` and fits `model`.
pub fn run_langevin_experiment(cfg: &SimConfig, model: Model, mu: f64, p: u32, order: usize, grid: &HyperGrid, split: Split) -> Result<RegressionMetrics> {
    if cfg.d != 1 {
        return Err(Error::InvalidArgument("the regression experiment is one-dimensional".into()));
    }
    let (y, w) = simulate_langevin_with_driver(cfg, mu, p, 0)?;
    run_regression_on_data(&y, &w, model, order, grid, split)
}

/// Default setup: `dt = 1/3650` on `[0, 4]`, a burn-in of 10 for both target and features.
pub fn langevin_config(seed: u64) -> SimConfig {
    SimConfig { seed, dt: 1.0 / 3650.0, t0: 0.0, t1: 4.0, d: 1, burn_in: 10.0 }
}
