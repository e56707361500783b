//! Exponential polynomials `Σ_j p_j(t)·e^{−μ_j t}`.
//!
//! The family is closed under `g(t) = ∫_0^t e^{−ν(t−u)} f(u) du`, which is the
//! step that builds the coefficients of a linear segment one letter at a time.

use crate::error::{Error, Result};

/// Rates closer than this (relative to the largest) are treated as equal.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub mu: f64,
    /// Polynomial coefficients, constant first.
    pub poly: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

fn same_rate(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs())
}

fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn add_poly(dst: &mut Vec<f64>, src: &[f64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0.0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::term(0.0, vec![c])
    }

    /// `c·e^{−μt}`.
    pub fn exp(mu: f64, c: f64) -> Self {
        Self::term(mu, vec![c])
    }

    pub fn term(mu: f64, poly: Vec<f64>) -> Self {
        let mut f = ExpPoly::zero();
        f.push(mu, &poly);
        f
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Largest polynomial degree over the terms.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.poly.len().saturating_sub(1)).max().unwrap_or(0)
    }

    fn push(&mut self, mu: f64, poly: &[f64]) {
        if let Some(t) = self.terms.iter_mut().find(|t| same_rate(t.mu, mu)) {
            add_poly(&mut t.poly, poly);
        } else {
            self.terms.push(Term { mu, poly: poly.to_vec() });
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.mu, &t.poly);
        }
        out
    }

    pub fn scaled(&self, k: f64) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term { mu: t.mu, poly: t.poly.iter().map(|c| c * k).collect() })
                .collect(),
        }
    }

    /// `g(t) = ∫_0^t e^{−ν(t−u)} f(u) du` in closed form.
    pub fn step_integrate(&self, nu: f64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for Term { mu, poly } in &self.terms {
            if same_rate(*mu, nu) {
                let mut anti = vec![0.0; poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    anti[k + 1] = c / (k + 1) as f64;
                }
                out.push(*mu, &anti);
            } else {
                // Q' + aQ = p, then g = Q(t)e^{−μt} − Q(0)e^{−νt}.
                let a = nu - mu;
                let deg = poly.len();
                let mut q = vec![0.0; deg];
                for j in (0..deg).rev() {
                    let next = if j + 1 < deg { q[j + 1] * (j + 1) as f64 } else { 0.0 };
                    q[j] = (poly[j] - next) / a;
                }
                let q0 = q[0];
                out.push(*mu, &q);
                out.push(nu, &[-q0]);
            }
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|Term { mu, poly }| horner(poly, t) * (-mu * t).exp()).sum()
    }

    /// Value as `t → ∞`; an error if some zero-rate term grows polynomially.
    pub fn limit_at_infinity(&self) -> Result<f64> {
        let mut sum = 0.0;
        for Term { mu, poly } in &self.terms {
            if *mu > 0.0 {
                continue;
            }
            if poly.iter().skip(1).any(|&c| c != 0.0) {
                return Err(Error::Divergent(format!("zero-rate term of degree {}", poly.len() - 1)));
            }
            sum += poly.first().copied().unwrap_or(0.0);
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_level_time_integral() {
        let lam = 1.7;
        let g = ExpPoly::constant(1.0).step_integrate(lam);
        for t in [0.0, 0.3, 2.0] {
            assert_relative_eq!(g.eval(t), (1.0 - (-lam * t).exp()) / lam, epsilon = 1e-15);
        }
        assert_relative_eq!(g.limit_at_infinity().unwrap(), 1.0 / lam, epsilon = 1e-15);
    }

    #[test]
    fn confluent_and_distinct_steps() {
        let f = ExpPoly::exp(1.0, 1.0);
        let g = f.step_integrate(1.0);
        assert_eq!(g.terms(), &[Term { mu: 1.0, poly: vec![0.0, 1.0] }]);
        assert_eq!(g.eval(0.0), 0.0);
        let h = f.step_integrate(3.0);
        for t in [0.1, 1.0, 4.0] {
            assert_relative_eq!(h.eval(t), ((-t).exp() - (-3.0 * t).exp()) / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn limits() {
        let f = ExpPoly::constant(3.0).add(&ExpPoly::exp(1.0, 1.0));
        assert_eq!(f.limit_at_infinity().unwrap(), 3.0);
        let g = ExpPoly::term(0.0, vec![0.0, 1.0]);
        assert!(g.limit_at_infinity().is_err());
        let half = ExpPoly::constant(0.5).add(&ExpPoly::exp(2.0, -0.5));
        assert_eq!(half.limit_at_infinity().unwrap(), 0.5);
    }

    #[test]
    fn two_letter_word_partial_fractions() {
        // rates 1 then 2: partial sums μ = (0, 1, 3)
        let g = ExpPoly::constant(1.0).step_integrate(1.0).step_integrate(3.0);
        let expect = [(0.0, 1.0 / 3.0), (1.0, -0.5), (3.0, 1.0 / 6.0)];
        assert_eq!(g.terms().len(), 3);
        for (mu, c) in expect {
            let t = g.terms().iter().find(|t| t.mu == mu).unwrap();
            assert_relative_eq!(t.poly[0], c, epsilon = 1e-15);
        }
        assert_relative_eq!(g.limit_at_infinity().unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(g.eval(0.0).abs() < 1e-16);
    }

    #[test]
    fn near_confluent_converges() {
        let eps = 1e-6;
        let f = ExpPoly::exp(1.0, 1.0);
        let exact = f.step_integrate(1.0);
        let near = f.step_integrate(1.0 + eps);
        for t in [0.2, 1.0, 3.0, 8.0] {
            assert!((exact.eval(t) - near.eval(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn repeated_confluence_raises_degree() {
        let mut g = ExpPoly::constant(1.0);
        for _ in 0..4 {
            g = g.step_integrate(0.0);
        }
        assert_eq!(g.degree(), 4);
        assert_relative_eq!(g.eval(2.0), 16.0 / 24.0, epsilon = 1e-15);
    }
}
