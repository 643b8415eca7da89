//! Scalar fields used by the 3x3 matrix layer.
//!
//! Two implementations: Gaussian rationals (`Complex<BigRational>`), where
//! every operation is exact, and `Complex64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Gaussian rational `p + q i` with `p, q` in Q.
pub type GaussRat = Complex<BigRational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn conj(&self) -> Self;
    /// Exact zero test in exact mode, `|z| <= tol` in float mode.
    fn is_zero_within(&self, tol: f64) -> bool;
    /// Modulus (approximate in exact mode); used only for pivot choice.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    /// Short display form used in reports.
    fn render(&self) -> String;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Scalar for GaussRat {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        let c = self.to_c64();
        c.norm()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn render(&self) -> String {
        format_gauss(self)
    }
}

impl Scalar for Complex64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn render(&self) -> String {
        if self.im == 0.0 {
            format!("{}", self.re)
        } else if self.re == 0.0 {
            format!("{}i", self.im)
        } else {
            format!("{}{:+}i", self.re, self.im)
        }
    }
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Real part as an exact rational, if the scalar has zero imaginary part.
pub fn real_rational(z: &GaussRat) -> Option<BigRational> {
    if z.im.is_zero() {
        Some(z.re.clone())
    } else {
        None
    }
}

/// Short human form of a Gaussian rational: `3/2`, `-i`, `1/2+2i`.
pub fn format_gauss(z: &GaussRat) -> String {
    let re = &z.re;
    let im = &z.im;
    let im_part = |v: &BigRational| -> String {
        if v.is_one() {
            "i".into()
        } else if (-v.clone()).is_one() {
            "-i".into()
        } else {
            format!("{v}i")
        }
    };
    match (re.is_zero(), im.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => re.to_string(),
        (true, false) => im_part(im),
        (false, false) => {
            let s = im_part(im);
            if im.is_negative() {
                format!("{re}{s}")
            } else {
                format!("{re}+{s}")
            }
        }
    }
}

/// Serializes a rational as the string `p/q` (or `p` when integral).
pub fn ser_rational<S: serde::Serializer>(r: &num_rational::Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_rationals<S: serde::Serializer>(v: &[num_rational::Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_field_ops_do_not_round() {
        let third = GaussRat::from_ratio(1, 3);
        let sum = third.clone() + third.clone() + third;
        assert_eq!(sum, <GaussRat as Scalar>::one());
        let i = GaussRat::i();
        assert_eq!(i.clone() * i, -<GaussRat as Scalar>::one());
    }

    #[test]
    fn float_from_ratio() {
        assert_eq!(Complex64::from_ratio(-2, 4), Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_gauss(&<GaussRat as Scalar>::zero()), "0");
        assert_eq!(format_gauss(&-GaussRat::i()), "-i");
        let z = GaussRat::from_ratio(1, 2) + GaussRat::i() * GaussRat::from_i64(2);
        assert_eq!(format_gauss(&z), "1/2+2i");
    }

    #[test]
    fn double_to_rational_is_exact() {
        let r = rational_from_f64(0.1).unwrap();
        assert_eq!(r.to_f64().unwrap(), 0.1);
        assert_ne!(r, BigRational::new(1.into(), 10.into()));
    }
}
