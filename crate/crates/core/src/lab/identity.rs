use super::sim::SimConfig;
use crate::efm::{EfmStream, PiecewisePath};
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{Shape, TensorSeq, Word};
use serde::Serialize;

/// `b_{k,m} = (−λ⁰)^{m−1} (k−1)!/(k−m)!` for `m = 1..=k`.
pub fn identity_coefficients(lambda0: f64, k: usize) -> Vec<f64> {
    (1..=k)
        .map(|m| {
            let falling: f64 = ((k - m + 1)..k).map(|j| j as f64).product();
            (-lambda0).powi(m as i32 - 1) * falling
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub k: usize,
    /// `∫ e^{−(kλ⁰+λ^i)(T−t)} ⟨sig_t, i⟩ dt` by the trapezoid rule on the path grid.
    pub lhs: f64,
    /// `Σ_m b_{k,m} ⟨sig_T, i0^m⟩`.
    pub rhs: f64,
    pub residual: f64,
}

/// Checks the exponential-moment identity for letter `i` on a time-augmented path started from ø.
pub fn exp_moment_identity_check(r: &Rates, k: usize, letter: u8, path: &PiecewisePath) -> Result<IdentityResidual> {
    if !path.is_time_augmented() {
        return Err(Error::InvalidArgument("path must be time augmented".into()));
    }
    if k == 0 || letter == 0 || letter as usize >= path.width() {
        return Err(Error::InvalidArgument(format!("need k >= 1 and a spatial letter, got k = {k}, i = {letter}")));
    }
    let shape = Shape::new(path.width(), k + 1)?;
    let mut stream = EfmStream::new(r, shape)?;
    let mut sig = TensorSeq::unit(shape);
    let rate = k as f64 * r.lambda()[0] + r.lambda()[letter as usize];
    let end = path.end();
    let idx = shape.index(&Word::letter(letter))?;
    let weight = |t: f64| (-rate * (end - t)).exp();
    let mut lhs = 0.0;
    let mut prev = weight(path.start()) * sig.coeffs()[idx];
    for j in 0..path.len() - 1 {
        stream.fold(&mut sig, path, j, j + 1);
        let (t0, t1) = (path.times()[j], path.times()[j + 1]);
        let cur = weight(t1) * sig.coeffs()[idx];
        lhs += 0.5 * (t1 - t0) * (prev + cur);
        prev = cur;
    }
    let b = identity_coefficients(r.lambda()[0], k);
    let mut rhs = 0.0;
    for (m, bm) in b.iter().enumerate() {
        let mut w = vec![letter];
        w.extend(std::iter::repeat_n(0u8, m + 1));
        rhs += bm * sig.get(&Word::new(&w));
    }
    Ok(IdentityResidual { k, lhs, rhs, residual: (lhs - rhs).abs() })
}

/// Simulated version: a time-augmented Brownian path on the window of `cfg`, burn-in included.
pub fn exp_moment_identity_on_simulated(cfg: &SimConfig, r: &Rates, k: usize) -> Result<IdentityResidual> {
    let path = super::sim::simulate_bm(cfg)?.with_time_augmentation(true);
    exp_moment_identity_check(r, k, 1, &path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        assert_eq!(identity_coefficients(1.0, 1), vec![1.0]);
        assert_eq!(identity_coefficients(1.0, 2), vec![1.0, -1.0]);
        assert_eq!(identity_coefficients(2.0, 3), vec![1.0, -4.0, 8.0]);
    }

    #[test]
    fn smooth_path_residual_is_small() {
        let r = Rates::new(vec![1.0, 0.7]).unwrap();
        let p = PiecewisePath::sample(0.0, 10.0, 20_000, 1, |t| vec![(2.0 * t).sin()], true).unwrap();
        for k in 1..=3 {
            let res = exp_moment_identity_check(&r, k, 1, &p).unwrap();
            assert!(res.residual < 1e-6, "k={k}: {res:?}");
        }
    }
}
