//! Adaptive quadrature: 1-D Gauss-Kronrod, iterated 3-D integration and
//! Genz-Malik cubature on boxes.

mod cubature;
mod gauss_kronrod;

pub use cubature::{genz_malik, genz_malik_rule, BoxRegion};
pub use gauss_kronrod::{gk15, integrate, integrate_with_breakpoints, nested3, Tolerance};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

impl QuadratureResult {
    pub const ZERO: QuadratureResult = QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0 };

    pub fn scale(self, c: f64) -> QuadratureResult {
        QuadratureResult {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            evaluations: self.evaluations,
        }
    }

    pub fn add(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("tolerance not reached: value {value}, error estimate {error_estimate} after {evaluations} evaluations")]
    NotConverged { value: f64, error_estimate: f64, evaluations: u64 },
    #[error("integrand returned a non-finite value")]
    NonFinite,
    #[error("invalid integration limits")]
    BadLimits,
}
