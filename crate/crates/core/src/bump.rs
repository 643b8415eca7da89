//! Compactly supported smooth test functions built as products of 1-D bumps
//! in matrix coordinates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::CMat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BumpError {
    #[error("unrecognised coordinate `{0}`")]
    Coordinate(String),
    #[error("bump radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("bump center and amplitude must be finite")]
    NonFinite,
}

/// A real number read off a matrix, or a scalar family parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coordinate {
    /// Real part of entry `(i, j)`, zero based.
    Re(usize, usize),
    /// Imaginary part of entry `(i, j)`, zero based.
    Im(usize, usize),
    T,
    Lambda,
}

impl Coordinate {
    pub fn is_parameter(&self) -> bool {
        matches!(self, Coordinate::T | Coordinate::Lambda)
    }

    /// `None` when the coordinate is a parameter that `params` leaves unset.
    pub fn extract(&self, g: &CMat, params: &FamilyParams) -> Option<f64> {
        match *self {
            Coordinate::Re(i, j) => Some(g.e[i][j].re),
            Coordinate::Im(i, j) => Some(g.e[i][j].im),
            Coordinate::T => params.t,
            Coordinate::Lambda => params.lambda,
        }
    }
}

/// Written `re[i,j]`, `im[i,j]` (one based), `t` or `lambda`.
impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::Re(i, j) => write!(f, "re[{},{}]", i + 1, j + 1),
            Coordinate::Im(i, j) => write!(f, "im[{},{}]", i + 1, j + 1),
            Coordinate::T => f.write_str("t"),
            Coordinate::Lambda => f.write_str("lambda"),
        }
    }
}

impl FromStr for Coordinate {
    type Err = BumpError;

    fn from_str(s: &str) -> Result<Self, BumpError> {
        let err = || BumpError::Coordinate(s.to_string());
        let s_trim = s.trim();
        match s_trim {
            "t" => return Ok(Coordinate::T),
            "lambda" => return Ok(Coordinate::Lambda),
            _ => {}
        }
        let (part, rest) = s_trim.split_at(s_trim.len().min(2));
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        let idx: Vec<usize> = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        if idx.len() != 2 || !(1..=3).contains(&idx[0]) || !(1..=3).contains(&idx[1]) {
            return Err(err());
        }
        let (i, j) = (idx[0] - 1, idx[1] - 1);
        match part {
            "re" => Ok(Coordinate::Re(i, j)),
            "im" => Ok(Coordinate::Im(i, j)),
            _ => Err(err()),
        }
    }
}

impl Serialize for Coordinate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coordinate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Values of the scalar parameters of a one-parameter family of matrices.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FamilyParams {
    pub t: Option<f64>,
    pub lambda: Option<f64>,
}

/// `s -> exp(-1/(1 - s^2))` on `|s| < 1`, zero elsewhere.
pub fn standard_bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFactor")]
pub struct BumpFactor {
    pub coord: Coordinate,
    pub center: f64,
    pub radius: f64,
}

#[derive(Deserialize)]
struct RawFactor {
    coord: Coordinate,
    center: f64,
    radius: f64,
}

impl TryFrom<RawFactor> for BumpFactor {
    type Error = BumpError;
    fn try_from(r: RawFactor) -> Result<Self, BumpError> {
        BumpFactor::new(r.coord, r.center, r.radius)
    }
}

impl BumpFactor {
    pub fn new(coord: Coordinate, center: f64, radius: f64) -> Result<Self, BumpError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(BumpError::Radius(radius));
        }
        if !center.is_finite() {
            return Err(BumpError::NonFinite);
        }
        Ok(BumpFactor { coord, center, radius })
    }

    pub fn value(&self, s: f64) -> f64 {
        standard_bump((s - self.center) / self.radius)
    }

    pub fn interval(&self) -> Interval {
        Interval { lo: self.center - self.radius, hi: self.center + self.radius }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// `amplitude * prod_k bump((coord_k(g) - center_k) / radius_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBump")]
pub struct BumpFunction {
    pub amplitude: f64,
    pub factors: Vec<BumpFactor>,
}

#[derive(Deserialize)]
struct RawBump {
    amplitude: f64,
    factors: Vec<BumpFactor>,
}

impl TryFrom<RawBump> for BumpFunction {
    type Error = BumpError;
    fn try_from(r: RawBump) -> Result<Self, BumpError> {
        BumpFunction::new(r.amplitude, r.factors)
    }
}

impl BumpFunction {
    pub fn new(amplitude: f64, factors: Vec<BumpFactor>) -> Result<Self, BumpError> {
        if !amplitude.is_finite() {
            return Err(BumpError::NonFinite);
        }
        Ok(BumpFunction { amplitude, factors })
    }

    pub fn scaled(&self, c: f64) -> BumpFunction {
        BumpFunction { amplitude: self.amplitude * c, factors: self.factors.clone() }
    }

    /// Evaluates with no family parameters set. Factors on `t` or `lambda`
    /// then read as outside their support.
    pub fn eval(&self, g: &CMat) -> f64 {
        self.eval_in_family(g, &FamilyParams::default())
    }

    pub fn eval_in_family(&self, g: &CMat, params: &FamilyParams) -> f64 {
        let mut v = self.amplitude;
        for f in &self.factors {
            if v == 0.0 {
                return 0.0;
            }
            match f.coord.extract(g, params) {
                Some(s) => v *= f.value(s),
                None => return 0.0,
            }
        }
        v
    }

    /// Per-factor support intervals, in declaration order.
    pub fn support_box(&self) -> Vec<Interval> {
        self.factors.iter().map(BumpFactor::interval).collect()
    }

    /// Intersection of the supports of every factor on `coord`, or `None`
    /// when no factor reads it. An empty intersection is returned as an
    /// interval with `lo > hi`.
    pub fn coordinate_support(&self, coord: Coordinate) -> Option<Interval> {
        self.factors
            .iter()
            .filter(|f| f.coord == coord)
            .map(BumpFactor::interval)
            .reduce(|a, b| Interval { lo: a.lo.max(b.lo), hi: a.hi.min(b.hi) })
    }

    pub fn coordinates(&self) -> Vec<Coordinate> {
        let mut out: Vec<Coordinate> = Vec::new();
        for f in &self.factors {
            if !out.contains(&f.coord) {
                out.push(f.coord);
            }
        }
        out
    }

    /// Factor product with coordinate values supplied directly, in the
    /// order of `coordinates()`.
    pub fn eval_coords(&self, values: &[(Coordinate, f64)]) -> f64 {
        let mut v = self.amplitude;
        for f in &self.factors {
            match values.iter().find(|(c, _)| *c == f.coord) {
                Some(&(_, s)) => v *= f.value(s),
                None => return 0.0,
            }
        }
        v
    }
}
