use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Coefficient type of a [`TensorSeq`](super::TensorSeq): `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn scale(self, k: f64) -> Self;
    /// Absolute value or modulus.
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
    /// Text form with 17 significant digits, exact on round trip.
    fn format(self) -> String;
    fn parse(s: &str) -> Option<Self>;
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn format(self) -> String {
        fmt_real(self)
    }
    fn parse(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn scale(self, k: f64) -> Self {
        Complex64::new(self.re * k, self.im * k)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    /// `re+imj`, e.g. `1.0000000000000000e0-2.5000000000000000e-1j`.
    fn format(self) -> String {
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}j", fmt_real(self.re), sign, fmt_real(self.im.abs()))
    }
    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('j') else {
            return s.parse().ok().map(Complex64::from_f64);
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
        let re: f64 = body[..split].parse().ok()?;
        let im: f64 = body[split + 1..].parse().ok()?;
        let im = if bytes[split] == b'-' { -im } else { im };
        Some(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_round_trip_is_exact() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0] {
            let back = f64::parse(&x.format()).unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn complex_round_trip_is_exact() {
        for z in [
            Complex64::new(0.1, -0.2),
            Complex64::new(-1e-7, 3e12),
            Complex64::new(1.0, -0.0),
        ] {
            let back = Complex64::parse(&z.format()).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.to_bits(), z.im.to_bits());
        }
        assert_eq!(Complex64::parse("2.5").unwrap(), Complex64::new(2.5, 0.0));
        assert_eq!(Complex64::parse("1e-3-2e-3j").unwrap(), Complex64::new(1e-3, -2e-3));
        assert!(Complex64::parse("abc").is_none());
    }
}
