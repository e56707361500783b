use crate::error::{Error, Result};
use crate::tensor::{Shape, TensorSeq};

/// Convergence threshold on the largest coefficient change of a sweep.
pub const TOLERANCE: f64 = 1e-10;
const MAX_SWEEPS: usize = 100_000;

/// Sufficient statistics `XᵀX/n`, `Xᵀy/n`, `yᵀy/n` of a design. Column 0 is the unpenalized intercept.
#[derive(Clone, Debug)]
pub struct Gram {
    pub p: usize,
    pub xtx: Vec<f64>,
    pub xty: Vec<f64>,
    pub yty: f64,
    pub n: usize,
}

impl Gram {
    /// `rows[i]` is one sample of `p` features.
    pub fn new(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        if rows.len() != y.len() || rows.is_empty() {
            return Err(Error::InvalidArgument(format!("{} feature rows for {} targets", rows.len(), y.len())));
        }
        let p = rows[0].len();
        let mut xtx = vec![0.0; p * p];
        let mut xty = vec![0.0; p];
        for (row, &t) in rows.iter().zip(y) {
            if row.len() != p {
                return Err(Error::InvalidArgument("ragged feature matrix".into()));
            }
            if !row.iter().all(|v| v.is_finite()) || !t.is_finite() {
                return Err(Error::NonFinite("feature matrix or target".into()));
            }
            for a in 0..p {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                xty[a] += ra * t;
                let line = &mut xtx[a * p..(a + 1) * p];
                for b in a..p {
                    line[b] += ra * row[b];
                }
            }
        }
        let n = rows.len();
        let inv = 1.0 / n as f64;
        for a in 0..p {
            for b in a..p {
                let v = xtx[a * p + b] * inv;
                xtx[a * p + b] = v;
                xtx[b * p + a] = v;
            }
            xty[a] *= inv;
        }
        let yty = y.iter().map(|v| v * v).sum::<f64>() * inv;
        Ok(Gram { p, xtx, xty, yty, n })
    }

    /// Gradient of `(1/2n)‖y − Xβ‖²`.
    pub fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.p).map(|a| self.row(a).iter().zip(beta).map(|(g, b)| g * b).sum::<f64>() - self.xty[a]).collect()
    }

    fn row(&self, a: usize) -> &[f64] {
        &self.xtx[a * self.p..(a + 1) * self.p]
    }
}

#[derive(Clone, Debug)]
pub struct NetFit {
    pub beta: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent on
/// `(1/2n)Σ residual² + αω‖β‖₁ + ½α(1−ω)‖β‖₂²`, the intercept `β₀` excluded from the penalty.
/// `start` gives a warm start.
pub fn coordinate_descent(g: &Gram, alpha: f64, omega: f64, start: Option<&[f64]>) -> Result<NetFit> {
    if !(alpha >= 0.0 && alpha.is_finite()) || !(0.0..=1.0).contains(&omega) {
        return Err(Error::InvalidArgument(format!("need alpha >= 0 and omega in [0,1], got {alpha}, {omega}")));
    }
    let p = g.p;
    let mut beta = start.map(|s| s.to_vec()).unwrap_or_else(|| vec![0.0; p]);
    // gb = XᵀXβ/n, kept in sync with beta
    let mut gb = vec![0.0; p];
    for (a, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (o, &x) in gb.iter_mut().zip(g.row(a)) {
                *o += x * b;
            }
        }
    }
    let (l1, l2) = (alpha * omega, alpha * (1.0 - omega));
    for sweep in 1..=MAX_SWEEPS {
        let mut change: f64 = 0.0;
        for j in 0..p {
            let gjj = g.xtx[j * p + j];
            if gjj == 0.0 {
                continue;
            }
            let rho = g.xty[j] - gb[j] + gjj * beta[j];
            let new = if j == 0 { rho / gjj } else { soft(rho, l1) / (gjj + l2) };
            let delta = new - beta[j];
            if delta != 0.0 {
                for (o, &x) in gb.iter_mut().zip(g.row(j)) {
                    *o += x * delta;
                }
                beta[j] = new;
                change = change.max(delta.abs());
            }
        }
        if change < TOLERANCE {
            return Ok(NetFit { beta, sweeps: sweep, converged: true });
        }
    }
    log::warn!("elastic net stopped after {MAX_SWEEPS} sweeps without reaching tolerance");
    Ok(NetFit { beta, sweeps: MAX_SWEEPS, converged: false })
}

/// Largest KKT violation: on zero coefficients `|∇| − αω`, elsewhere the stationarity residual.
pub fn kkt_violation(g: &Gram, beta: &[f64], alpha: f64, omega: f64) -> f64 {
    let grad = g.gradient(beta);
    let (l1, l2) = (alpha * omega, alpha * (1.0 - omega));
    let mut worst: f64 = 0.0;
    for j in 0..g.p {
        let v = if j == 0 {
            grad[0].abs()
        } else if beta[j] == 0.0 {
            grad[j].abs() - l1
        } else {
            (grad[j] + l2 * beta[j] + l1 * beta[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Fits `ℓ` so that `⟨sig_{t_i}, ℓ⟩ ≈ y_i`; column `j` of `features` is the coefficient of word index `j` of `shape`.
pub fn fit_elastic_net(shape: Shape, features: &[Vec<f64>], targets: &[f64], alpha: f64, omega: f64) -> Result<TensorSeq> {
    if features.first().map(|r| r.len()) != Some(shape.len()) {
        return Err(Error::InvalidArgument(format!("expected {} feature columns", shape.len())));
    }
    let g = Gram::new(features, targets)?;
    let fit = coordinate_descent(&g, alpha, omega, None)?;
    TensorSeq::from_coeffs(shape, fit.beta)
}
