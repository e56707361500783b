use super::{Scalar, Shape, Word};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Truncated element of the tensor algebra over `shape.width()` letters.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeq<S: Scalar = f64> {
    shape: Shape,
    coeffs: Vec<S>,
}

/// Which norm [`TensorSeq::norm`] computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

impl<S: Scalar> TensorSeq<S> {
    pub fn zeros(shape: Shape) -> Self {
        TensorSeq { shape, coeffs: vec![S::zero(); shape.len()] }
    }

    /// The empty word ø with coefficient one.
    pub fn unit(shape: Shape) -> Self {
        let mut t = Self::zeros(shape);
        t.coeffs[0] = S::one();
        t
    }

    pub fn from_word(shape: Shape, w: &Word, value: S) -> Result<Self> {
        let mut t = Self::zeros(shape);
        t.set(w, value)?;
        Ok(t)
    }

    pub fn letter(shape: Shape, i: u8) -> Result<Self> {
        Self::from_word(shape, &Word::letter(i), S::one())
    }

    pub fn from_terms<'a>(shape: Shape, terms: impl IntoIterator<Item = (&'a Word, S)>) -> Result<Self> {
        let mut t = Self::zeros(shape);
        for (w, v) in terms {
            t.add_to(w, v)?;
        }
        Ok(t)
    }

    pub fn from_coeffs(shape: Shape, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != shape.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a shape holding {}",
                coeffs.len(),
                shape.len()
            )));
        }
        Ok(TensorSeq { shape, coeffs })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.shape.width()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn level(&self, n: usize) -> &[S] {
        &self.coeffs[self.shape.level_range(n)]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [S] {
        let r = self.shape.level_range(n);
        &mut self.coeffs[r]
    }

    /// Coefficient of `w`; zero for words longer than the order.
    ///
    /// Panics if `w` has a letter outside the alphabet.
    pub fn get(&self, w: &Word) -> S {
        if let Err(e) = w.check(self.width()) {
            panic!("{e}");
        }
        match self.shape.index(w) {
            Ok(i) => self.coeffs[i],
            Err(_) => S::zero(),
        }
    }

    pub fn empty_coeff(&self) -> S {
        self.coeffs[0]
    }

    pub fn set(&mut self, w: &Word, value: S) -> Result<()> {
        let i = self.shape.index(w)?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn add_to(&mut self, w: &Word, value: S) -> Result<()> {
        let i = self.shape.index(w)?;
        self.coeffs[i] += value;
        Ok(())
    }

    /// Nonzero coefficients with their words, in index order.
    pub fn terms(&self) -> impl Iterator<Item = (Word, S)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (self.shape.word(i), c))
    }

    /// Same coefficients at another order: higher levels are dropped or zero-filled.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        let shape = self.shape.with_order(order)?;
        let mut out = Self::zeros(shape);
        let n = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        Ok(out)
    }

    pub(crate) fn common_shape(&self, other: &Self) -> Result<Shape> {
        if self.width() != other.width() {
            return Err(Error::AlphabetMismatch(self.width(), other.width()));
        }
        Ok(if self.order() <= other.order() { self.shape } else { other.shape })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self> {
        let shape = self.common_shape(other)?;
        let coeffs = self.coeffs[..shape.len()]
            .iter()
            .zip(&other.coeffs[..shape.len()])
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(TensorSeq { shape, coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += k·other` on the shared truncation.
    pub fn axpy(&mut self, k: S, other: &Self) -> Result<()> {
        let shape = self.common_shape(other)?;
        for (a, &b) in self.coeffs[..shape.len()].iter_mut().zip(&other.coeffs) {
            *a += k * b;
        }
        Ok(())
    }

    pub fn scaled(&self, k: S) -> Self {
        TensorSeq { shape: self.shape, coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        TensorSeq { shape: self.shape, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    /// Concatenation product, truncated at the smaller order.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let shape = self.common_shape(other)?;
        let mut out = Self::zeros(shape);
        for n in 0..=shape.order() {
            for k in 0..=n {
                let a = self.level(k);
                let b = other.level(n - k);
                let m = b.len();
                let dst = &mut out.coeffs[shape.level_range(n)];
                for (p, &ap) in a.iter().enumerate() {
                    if ap.is_zero() {
                        continue;
                    }
                    let row = &mut dst[p * m..(p + 1) * m];
                    for (o, &bs) in row.iter_mut().zip(b) {
                        *o += ap * bs;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(a|_u)^v = a^{vu}`; the shape is kept, top levels become zero.
    pub fn project(&self, suffix: &Word) -> Self {
        if let Err(e) = suffix.check(self.width()) {
            panic!("{e}");
        }
        let mut out = Self::zeros(self.shape);
        let s = suffix.len();
        if s > self.order() {
            return out;
        }
        let tail = self.shape.index_in_level(suffix.letters());
        let stride = self.shape.level_len(s);
        for n in 0..=self.order() - s {
            let src = self.level(n + s);
            for (j, o) in out.level_mut(n).iter_mut().enumerate() {
                *o = src[j * stride + tail];
            }
        }
        out
    }

    /// `Σ_v a^v b^v` over the shared truncation.
    pub fn bracket(&self, other: &Self) -> Result<S> {
        let shape = self.common_shape(other)?;
        let mut acc = S::zero();
        for (&a, &b) in self.coeffs[..shape.len()].iter().zip(&other.coeffs) {
            acc += a * b;
        }
        Ok(acc)
    }

    pub fn norm(&self, q: Norm) -> f64 {
        match q {
            Norm::L1 => self.coeffs.iter().map(|c| c.modulus()).sum(),
            Norm::L2 => self.coeffs.iter().map(|c| c.modulus().powi(2)).sum::<f64>().sqrt(),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm(Norm::L2)
    }

    /// ℓ2 norm of the coefficients of nonempty words.
    pub fn tail_norm_l2(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c.modulus().powi(2)).sum::<f64>().sqrt()
    }

    pub fn level_norm_l2(&self, n: usize) -> f64 {
        self.level(n).iter().map(|c| c.modulus().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.modulus()).fold(0.0, f64::max)
    }

    /// Highest level holding a nonzero coefficient (0 for the zero element).
    pub fn degree(&self) -> usize {
        (0..=self.order()).rev().find(|&n| self.level(n).iter().any(|c| !c.is_zero())).unwrap_or(0)
    }

    /// Lowest level holding a nonzero coefficient, `None` for the zero element.
    pub fn min_degree(&self) -> Option<usize> {
        (0..=self.order()).find(|&n| self.level(n).iter().any(|c| !c.is_zero()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().min(other.coeffs.len());
        self.coeffs[..n].iter().zip(&other.coeffs[..n]).map(|(&a, &b)| (a - b).modulus()).fold(0.0, f64::max)
    }
}

impl TensorSeq<f64> {
    pub fn to_complex(&self) -> TensorSeq<Complex64> {
        TensorSeq { shape: self.shape, coeffs: self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_digits(s).unwrap()
    }

    fn seq(shape: Shape, terms: &[(&str, f64)]) -> TensorSeq {
        let words: Vec<(Word, f64)> = terms.iter().map(|(s, v)| (w(s), *v)).collect();
        TensorSeq::from_terms(shape, words.iter().map(|(w, v)| (w, *v))).unwrap()
    }

    #[test]
    fn tensor_of_one_letter_words() {
        let s = Shape::new(2, 3).unwrap();
        let a = seq(s, &[("", 1.0), ("1", 2.0)]);
        let b = seq(s, &[("", 1.0), ("0", 3.0)]);
        let c = a.tensor(&b).unwrap();
        assert_eq!(c, seq(s, &[("", 1.0), ("1", 2.0), ("0", 3.0), ("10", 6.0)]));
        assert_eq!(a.tensor(&TensorSeq::unit(s)).unwrap(), a);
    }

    #[test]
    fn tensor_truncates_to_smaller_order() {
        let a = seq(Shape::new(2, 3).unwrap(), &[("1", 1.0)]);
        let b = seq(Shape::new(2, 2).unwrap(), &[("11", 1.0)]);
        let c = a.tensor(&b).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.norm_l2(), 0.0);
        let other = seq(Shape::new(3, 2).unwrap(), &[]);
        assert!(matches!(a.tensor(&other), Err(Error::AlphabetMismatch(2, 3))));
    }

    #[test]
    fn projection_examples() {
        let s = Shape::new(2, 3).unwrap();
        let a = seq(s, &[("10", 5.0)]);
        assert_eq!(a.project(&w("0")), seq(s, &[("1", 5.0)]));
        assert_eq!(a.project(&w("1")).norm_l2(), 0.0);
        let b = seq(s, &[("", 1.0), ("1", 1.0), ("11", 1.0), ("01", 1.0)]);
        assert_eq!(b.project(&w("1")), seq(s, &[("", 1.0), ("1", 1.0), ("0", 1.0)]));
    }

    #[test]
    fn bracket_and_norms() {
        let s = Shape::new(3, 2).unwrap();
        assert_eq!(TensorSeq::<f64>::unit(s).bracket(&TensorSeq::unit(s)).unwrap(), 1.0);
        assert_eq!(seq(s, &[("1", 1.0)]).bracket(&seq(s, &[("2", 1.0)])).unwrap(), 0.0);
        let a = seq(s, &[("10", 2.0), ("", 3.0)]);
        let b = seq(s, &[("10", 4.0), ("", 1.0)]);
        assert_eq!(a.bracket(&b).unwrap(), 11.0);
        assert_eq!(TensorSeq::<f64>::zeros(s).norm(Norm::L2), 0.0);
        let c = seq(s, &[("1", 3.0), ("0", 4.0)]);
        assert_eq!(c.norm(Norm::L2), 5.0);
        assert_eq!(c.norm(Norm::L1), 7.0);
    }

    #[test]
    fn degrees() {
        let s = Shape::new(2, 4).unwrap();
        let a = seq(s, &[("1", 1.0), ("110", 2.0)]);
        assert_eq!(a.degree(), 3);
        assert_eq!(a.min_degree(), Some(1));
        assert_eq!(TensorSeq::<f64>::zeros(s).min_degree(), None);
    }
}
