//! Discrete-series characters on the compact Cartan subgroup, L-packets,
//! kappa and stable sums, endoscopic transfer to `H = S(U(1,1) x U(1))`,
//! and the finite pairing inversion.

mod characters;
mod pairing;
mod torus;
mod transfer;

pub use characters::*;
pub use pairing::*;
pub use torus::*;
pub use transfer::*;

use num_rational::Rational64;
use thiserror::Error;

use crate::roots::Weight;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EndoscopyError {
    #[error("element is not regular")]
    IrregularElement,
    #[error("parameter {0} is not regular")]
    IrregularParameter(Weight),
    #[error("angles do not sum to a multiple of 2 pi: {0:?}")]
    NotInTorus([f64; 3]),
    #[error("H element does not match the G element under the chosen root matching")]
    UnmatchedPair,
    #[error("character is not trivial on the fibers of the cover: pairing with H12 is {0}")]
    NotCoverInvariant(Rational64),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("kappa: {0}")]
    Kappa(String),
    #[error("pairing table rows are not orthogonal")]
    NonOrthogonalTable,
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
}

pub const DIM_G: usize = 8;
pub const DIM_K: usize = 4;
pub const DIM_H: usize = 4;
pub const DIM_K_H: usize = 2;

/// `q = dim(G/K) / 2`.
pub const fn q_from_dims(dim_group: usize, dim_compact: usize) -> usize {
    (dim_group - dim_compact) / 2
}

pub const Q_G: usize = q_from_dims(DIM_G, DIM_K);
pub const Q_H: usize = q_from_dims(DIM_H, DIM_K_H);

pub(crate) fn sign_power(q: usize) -> f64 {
    if q % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_ranks() {
        assert_eq!(Q_G, 2);
        assert_eq!(Q_H, 1);
        assert_eq!(sign_power(Q_G + Q_H), -1.0);
    }
}
