//! Characteristic functions of `⟨sig_{0,T}, ℓ⟩` for time-augmented Brownian motion from the
//! truncated mean-reverting Riccati equation `ψ̇ = −Λψ + F(ψ)`, `ψ_0 = iℓ`, `φ_T = e^{ψ_T^ø}`.
//!
//! The representation presumes the local martingales involved are true martingales; this is
//! not checked, the Monte Carlo comparison in the acceptance suite is the evidence.

use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{TensorSeq, Word};
use num_complex::Complex64;
use serde::Serialize;

/// Blow-up threshold on coefficient moduli.
pub const BLOW_UP: f64 = 1e8;
/// Below this non-ø mass the solution counts as stationary.
pub const STATIONARY_TOL: f64 = 1e-8;

pub type CTensor = TensorSeq<Complex64>;

#[derive(Clone, Debug)]
pub struct RiccatiState {
    pub t: f64,
    pub psi: CTensor,
}

/// `F(ψ) = ψ|₀ + ½Σᵢ ψ|ᵢᵢ + ½Σᵢ (ψ|ᵢ)^⧢2`, truncated at the order of `ψ`.
#[allow(non_snake_case)]
pub fn riccati_F(r: &Rates, psi: &CTensor) -> Result<CTensor> {
    if r.width() != psi.width() {
        return Err(Error::AlphabetMismatch(r.width(), psi.width()));
    }
    let half = Complex64::new(0.5, 0.0);
    let mut out = psi.project(&Word::letter(0));
    for i in 1..psi.width() as u8 {
        out.axpy(half, &psi.project(&Word::new(&[i, i])))?;
        let p = psi.project(&Word::letter(i));
        out.axpy(half, &p.shuffle(&p)?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CharFuncSolution {
    pub phi_t: Complex64,
    pub times: Vec<f64>,
    /// `ψ^ø` at every step.
    pub psi_empty: Vec<Complex64>,
    /// `‖ψ_T − ψ_T^ø ø‖₂`.
    pub non_empty_mass: f64,
    pub stationary: bool,
    #[serde(skip)]
    pub psi_t: CTensor,
}

impl CharFuncSolution {
    pub fn phi_at(&self, k: usize) -> Complex64 {
        self.psi_empty[k].exp()
    }
}

fn non_empty_mass(psi: &CTensor) -> f64 {
    psi.coeffs()[1..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Predictor-corrector: `ψ^P = D_hψ + C_h F(ψ)`, `ψ_{t+h} = D_hψ + C_h(F(ψ) + F(ψ^P))/2`.
pub fn solve_charfunc(r: &Rates, ell: &TensorSeq, horizon: f64, dt: f64, order: usize) -> Result<CharFuncSolution> {
    if !(horizon >= 0.0 && horizon.is_finite()) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("need T >= 0 and dt > 0, got T = {horizon}, dt = {dt}")));
    }
    if r.width() != ell.width() {
        return Err(Error::AlphabetMismatch(r.width(), ell.width()));
    }
    let shape = ell.shape().with_order(order)?;
    let table = r.table(shape)?;
    let mut psi: CTensor = ell.with_order(order)?.to_complex().scaled(Complex64::i());
    let steps = (horizon / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut psi_empty = Vec::with_capacity(steps + 1);
    times.push(0.0);
    psi_empty.push(psi.empty_coeff());
    let mut t = 0.0;
    let mut h = dt;
    for k in 0..steps {
        if k + 1 == steps {
            h = horizon - t;
        }
        let (disc, cf) = (table.discount(h), table.c_factors(h));
        let mut base = psi.clone();
        crate::rates::RateTable::scale_in_place(&disc, &mut base);
        let f0 = riccati_F(r, &psi)?;
        let mut pred = f0.clone();
        crate::rates::RateTable::scale_in_place(&cf, &mut pred);
        let pred = base.add(&pred)?;
        let f1 = riccati_F(r, &pred)?;
        let mut corr = f0.add(&f1)?.scaled(Complex64::new(0.5, 0.0));
        crate::rates::RateTable::scale_in_place(&cf, &mut corr);
        psi = base.add(&corr)?;
        t += h;
        if let Some(c) = psi.coeffs().iter().find(|c| !(c.norm() <= BLOW_UP)) {
            log::warn!("Riccati blow-up at t = {t} (|coefficient| = {}); try halving dt", c.norm());
            return Err(Error::BlowUp(t));
        }
        times.push(t);
        psi_empty.push(psi.empty_coeff());
    }
    let mass = non_empty_mass(&psi);
    Ok(CharFuncSolution {
        phi_t: psi.empty_coeff().exp(),
        times,
        psi_empty,
        non_empty_mass: mass,
        stationary: mass < STATIONARY_TOL,
        psi_t: psi,
    })
}
