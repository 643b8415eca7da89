use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EndoscopyError;
use crate::roots::Weight;

/// Separation below which two eigenvalues count as equal.
pub const REGULARITY_TOL: f64 = 1e-12;

fn wrapped_sum_is_zero(angles: [f64; 3]) -> bool {
    let s = angles.iter().sum::<f64>() / TAU;
    (s - s.round()).abs() < 1e-9
}

fn distinct(a: f64, b: f64) -> bool {
    ((a - b) / 2.0).sin().abs() > REGULARITY_TOL
}

/// `e^{i <lambda, theta>}`.
pub fn monomial(angles: [f64; 3], lambda: &Weight) -> Complex64 {
    let l = lambda.to_f64();
    Complex64::from_polar(1.0, l[0] * angles[0] + l[1] * angles[1] + l[2] * angles[2])
}

/// `diag(e^{i th1}, e^{i th2}, e^{i th3})` in the compact Cartan subgroup
/// of `G`, stored with `th3 = -th1 - th2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticElement {
    angles: [f64; 3],
    regular: bool,
}

impl EllipticElement {
    pub fn new(angles: [f64; 3]) -> Result<Self, EndoscopyError> {
        if angles.iter().any(|a| !a.is_finite()) || !wrapped_sum_is_zero(angles) {
            return Err(EndoscopyError::NotInTorus(angles));
        }
        Ok(Self::from_pair(angles[0], angles[1]))
    }

    pub fn from_pair(th1: f64, th2: f64) -> Self {
        let angles = [th1, th2, -th1 - th2];
        let regular = distinct(angles[0], angles[1]) && distinct(angles[1], angles[2]) && distinct(angles[0], angles[2]);
        EllipticElement { angles, regular }
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn inverse(&self) -> Self {
        Self::from_pair(-self.angles[0], -self.angles[1])
    }

    pub fn monomial(&self, lambda: &Weight) -> Complex64 {
        monomial(self.angles, lambda)
    }

    pub fn require_regular(&self) -> Result<(), EndoscopyError> {
        if self.regular {
            Ok(())
        } else {
            Err(EndoscopyError::IrregularElement)
        }
    }

    /// `n` regular points from a two-dimensional Kronecker sequence, each
    /// with every `|sin((th_i - th_j)/2)| > 0.05`.
    pub fn quasi_random_grid(n: usize, offset: f64) -> Vec<EllipticElement> {
        const A1: f64 = 0.618_033_988_749_894_8;
        const A2: f64 = 0.754_877_666_246_692_7;
        let mut out = Vec::with_capacity(n);
        let mut i = 0u64;
        while out.len() < n {
            i += 1;
            let u = (i as f64 * A1 + offset).rem_euclid(1.0);
            let v = (i as f64 * A2 + 0.5 * offset).rem_euclid(1.0);
            let g = Self::from_pair(TAU * u - PI, TAU * v - PI);
            let th = g.angles;
            let margin = [(0, 1), (1, 2), (0, 2)]
                .iter()
                .map(|&(k, l)| ((th[k] - th[l]) / 2.0).sin().abs())
                .fold(f64::INFINITY, f64::min);
            if margin > 0.05 {
                out.push(g);
            }
        }
        out
    }
}

/// Element of the compact Cartan subgroup of `H`. Index 0 is the `U(1)`
/// factor; indices 1 and 2 are the torus of the `U(1,1)` block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HElement {
    angles: [f64; 3],
    regular: bool,
}

impl HElement {
    pub fn new(angles: [f64; 3]) -> Result<Self, EndoscopyError> {
        if angles.iter().any(|a| !a.is_finite()) || !wrapped_sum_is_zero(angles) {
            return Err(EndoscopyError::NotInTorus(angles));
        }
        Ok(HElement { angles, regular: distinct(angles[1], angles[2]) })
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }

    /// Only the root `alpha23` of `H` can vanish.
    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn inverse(&self) -> Self {
        HElement { angles: self.angles.map(|a| -a), regular: self.regular }
    }

    pub fn monomial(&self, lambda: &Weight) -> Complex64 {
        monomial(self.angles, lambda)
    }

    pub fn require_regular(&self) -> Result<(), EndoscopyError> {
        if self.regular {
            Ok(())
        } else {
            Err(EndoscopyError::IrregularElement)
        }
    }

    /// Equality of the diagonal entries `e^{i th}`.
    pub fn same_point(&self, other: &HElement) -> bool {
        self.angles
            .iter()
            .zip(&other.angles)
            .all(|(a, b)| ((a - b) / 2.0).sin().abs() < 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_third_angle() {
        let g = EllipticElement::new([1.0, 2.0, -3.0 + TAU]).unwrap();
        assert_eq!(g.angles(), [1.0, 2.0, -3.0]);
        assert!(EllipticElement::new([1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn regularity() {
        assert!(!EllipticElement::from_pair(0.5, 0.5).is_regular());
        assert!(!EllipticElement::from_pair(0.5, 0.5 + TAU).is_regular());
        assert!(EllipticElement::from_pair(PI / 2.0, 0.0).is_regular());
        assert!(HElement::new([0.0, 1.0, -1.0 + TAU]).unwrap().is_regular());
        assert!(!HElement::new([-2.0, 1.0, 1.0]).unwrap().is_regular());
    }

    #[test]
    fn grid_is_regular_and_deterministic() {
        let a = EllipticElement::quasi_random_grid(32, 0.0);
        let b = EllipticElement::quasi_random_grid(32, 0.0);
        assert_eq!(a, b);
        assert!(a.iter().all(EllipticElement::is_regular));
        assert_ne!(a, EllipticElement::quasi_random_grid(32, 0.31));
    }
}
