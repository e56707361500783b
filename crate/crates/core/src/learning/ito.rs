use crate::efm::{signature_trajectory, PiecewisePath};
use crate::error::{Error, Result};
use crate::rates::Rates;
use crate::tensor::{TensorSeq, Word};

/// `d⟨sig_t, ℓ_t⟩ = ⟨sig_t, drift⟩ dt + Σ_i ⟨sig_t, vol[i]⟩ dW^i` for time-augmented Brownian motion.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalDecomposition {
    pub drift: TensorSeq,
    /// One entry per spatial letter `1..=d`.
    pub vol: Vec<TensorSeq>,
}

/// `drift = ℓ̇ − Λℓ + ℓ|₀ + ½Σᵢ ℓ|ᵢᵢ`, `vol[i] = ℓ|ᵢ`. Letter 0 is the clock.
pub fn ito_decompose(r: &Rates, ell: &TensorSeq, ell_dot: Option<&TensorSeq>) -> Result<FunctionalDecomposition> {
    if r.width() != ell.width() {
        return Err(Error::AlphabetMismatch(r.width(), ell.width()));
    }
    if ell.width() < 2 {
        return Err(Error::InvalidArgument("need a clock letter and at least one spatial letter".into()));
    }
    let mut drift = ell.project(&Word::letter(0));
    drift = drift.sub(&r.apply_lambda(ell)?)?;
    if let Some(dot) = ell_dot {
        drift = drift.add(dot)?;
    }
    let mut vol = Vec::with_capacity(ell.width() - 1);
    for i in 1..ell.width() as u8 {
        drift.axpy(0.5, &ell.project(&Word::new(&[i, i])))?;
        vol.push(ell.project(&Word::letter(i)));
    }
    Ok(FunctionalDecomposition { drift, vol })
}

/// Per-step residuals of the Itô decomposition along a time-augmented path:
/// `Δ⟨sig, ℓ⟩ − ⟨sig_k, drift⟩Δt − Σᵢ⟨sig_k, vol[i]⟩ΔWⁱ`, with the signature started at ø.
pub fn ito_residuals(r: &Rates, ell: &TensorSeq, path: &PiecewisePath) -> Result<Vec<f64>> {
    if !path.is_time_augmented() {
        return Err(Error::InvalidArgument("path must be time augmented".into()));
    }
    let dec = ito_decompose(r, ell, None)?;
    let sigs = signature_trajectory(r, path, ell.order())?;
    let value = |s: &TensorSeq, l: &TensorSeq| s.bracket(l).expect("shapes agree");
    let mut out = Vec::with_capacity(path.len() - 1);
    for k in 0..path.len() - 1 {
        let incr = path.increment(k);
        let mut pred = value(&sigs[k], &dec.drift) * incr[0];
        for (i, v) in dec.vol.iter().enumerate() {
            pred += value(&sigs[k], v) * incr[i + 1];
        }
        out.push(value(&sigs[k + 1], ell) - value(&sigs[k], ell) - pred);
    }
    Ok(out)
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    fn w(s: &str) -> Word {
        Word::from_digits(s).unwrap()
    }

    #[test]
    fn hand_examples() {
        let r = Rates::new(vec![1.5, 0.7]).unwrap();
        let shape = Shape::new(2, 3).unwrap();
        let d = ito_decompose(&r, &TensorSeq::letter(shape, 1).unwrap(), None).unwrap();
        assert_eq!(d.drift, TensorSeq::from_word(shape, &w("1"), -0.7).unwrap());
        assert_eq!(d.vol[0], TensorSeq::unit(shape));

        let d = ito_decompose(&r, &TensorSeq::unit(shape), None).unwrap();
        assert_eq!(d.drift, TensorSeq::zeros(shape));
        assert_eq!(d.vol[0], TensorSeq::zeros(shape));

        let d = ito_decompose(&r, &TensorSeq::from_word(shape, &w("11"), 1.0).unwrap(), None).unwrap();
        let mut want = TensorSeq::from_word(shape, &w("11"), -1.4).unwrap();
        want.set(&Word::empty(), 0.5).unwrap();
        assert!(d.drift.max_abs_diff(&want) < 1e-15);
        assert_eq!(d.vol[0], TensorSeq::letter(shape, 1).unwrap());
    }

    #[test]
    fn time_dependent_functional() {
        let r = Rates::new(vec![1.0, 1.0]).unwrap();
        let shape = Shape::new(2, 2).unwrap();
        let zero = TensorSeq::zeros(shape);
        let dot = TensorSeq::from_word(shape, &w("10"), 3.0).unwrap();
        let a = ito_decompose(&r, &zero, Some(&dot)).unwrap();
        assert_eq!(a.drift, dot);
    }

    #[test]
    fn residual_shrinks_with_dt() {
        let r = Rates::new(vec![1.0, 2.0]).unwrap();
        let shape = Shape::new(2, 3).unwrap();
        let ell = TensorSeq::from_terms(shape, [(&w("11"), 1.0), (&w("1"), 0.5), (&w("101"), -1.0)]).unwrap();
        let mut res = vec![];
        for dt in [1e-2, 5e-3] {
            let cfg = crate::lab::SimConfig::new(3, dt, 0.0, 10.0, 1, 0.0).unwrap();
            let p = crate::lab::simulate_bm(&cfg).unwrap().with_time_augmentation(true);
            res.push(rms(&ito_residuals(&r, &ell, &p).unwrap()));
        }
        let slope = (res[0] / res[1]).log2();
        assert!((slope - 1.0).abs() < 0.2, "{res:?}");
    }
}
