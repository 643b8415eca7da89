//! 3x3 complex matrices over an exact or floating scalar field.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalar::{GaussRat, Mode, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat3<S> {
    pub e: [[S; 3]; 3],
}

pub type CMat = Mat3<Complex64>;
pub type QMat = Mat3<GaussRat>;

impl<S: Scalar> Mat3<S> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Mat3 {
            e: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| S::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diag(d: [S; 3]) -> Self {
        let [a, b, c] = d;
        let mut m = Self::zero();
        m.e[0][0] = a;
        m.e[1][1] = b;
        m.e[2][2] = c;
        m
    }

    /// Matrix with integer entries.
    pub fn from_ints(rows: [[i64; 3]; 3]) -> Self {
        Self::from_fn(|i, j| S::from_i64(rows[i][j]))
    }

    /// Elementary matrix `E_kl` (0-based indices).
    pub fn unit(k: usize, l: usize) -> Self {
        let mut m = Self::zero();
        m.e[k][l] = S::one();
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.e[i][j]
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(|i, j| self.e[i][j].clone() * s.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.e[j][i].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.e[j][i].conj())
    }

    pub fn trace(&self) -> S {
        self.e[0][0].clone() + self.e[1][1].clone() + self.e[2][2].clone()
    }

    pub fn det(&self) -> S {
        let m = &self.e;
        let minor = |a: usize, b: usize, c: usize, d: usize| {
            m[1][a].clone() * m[2][b].clone() - m[1][c].clone() * m[2][d].clone()
        };
        m[0][0].clone() * minor(1, 2, 2, 1) - m[0][1].clone() * minor(0, 2, 2, 0)
            + m[0][2].clone() * minor(0, 1, 1, 0)
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes
    /// (exactly, or below `tol` in float mode).
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        let d = self.det();
        if d.is_zero_within(tol) {
            return None;
        }
        let m = &self.e;
        let cof = |r: usize, c: usize| {
            let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
            let cols: Vec<usize> = (0..3).filter(|&x| x != c).collect();
            let v = m[rows[0]][cols[0]].clone() * m[rows[1]][cols[1]].clone()
                - m[rows[0]][cols[1]].clone() * m[rows[1]][cols[0]].clone();
            if (r + c) % 2 == 0 {
                v
            } else {
                -v
            }
        };
        Some(Self::from_fn(|i, j| cof(j, i) / d.clone()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.clone() * other.clone() - other.clone() * self.clone()
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.e.iter().flatten().all(|z| z.is_zero_within(tol))
    }

    pub fn to_c64(&self) -> CMat {
        Mat3::from_fn(|i, j| self.e[i][j].to_c64())
    }

    /// Entrywise max modulus.
    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.magnitude())
            .fold(0.0, f64::max)
    }
}

impl CMat {
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        (self.clone() - other.clone()).max_abs()
    }

    pub fn norm1(&self) -> f64 {
        (0..3)
            .map(|j| (0..3).map(|i| self.e[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> CMat {
        Mat3::from_fn(|i, j| Complex64::new(rows[i][j], 0.0))
    }
}

impl<S: Scalar> Add for Mat3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.e[i][j].clone() + rhs.e[i][j].clone())
    }
}

impl<S: Scalar> Sub for Mat3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.e[i][j].clone() - rhs.e[i][j].clone())
    }
}

impl<S: Scalar> Neg for Mat3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.e[i][j].clone())
    }
}

impl<S: Scalar> Mul for Mat3<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<S: Scalar> Mul for &Mat3<S> {
    type Output = Mat3<S>;
    fn mul(self, rhs: Self) -> Mat3<S> {
        Mat3::from_fn(|i, j| {
            self.e[i][0].clone() * rhs.e[0][j].clone()
                + self.e[i][1].clone() * rhs.e[1][j].clone()
                + self.e[i][2].clone() * rhs.e[2][j].clone()
        })
    }
}

/// Coefficients `c` with `sum c_k basis[k] == m`, or `None` if `m` is not
/// in the span. Normal equations solved by elimination; the recomposition
/// is checked exactly in exact mode and to `tol` in float mode.
pub fn decompose<S: Scalar>(m: &Mat3<S>, basis: &[Mat3<S>], tol: f64) -> Option<Vec<S>> {
    let n = basis.len();
    let inner = |a: &Mat3<S>, b: &Mat3<S>| (a.adjoint() * b.clone()).trace();
    let mut gram: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| inner(&basis[i], &basis[j])).collect())
        .collect();
    let mut rhs: Vec<S> = (0..n).map(|i| inner(&basis[i], m)).collect();
    let coeffs = solve_linear(&mut gram, &mut rhs, tol)?;
    let mut back = Mat3::zero();
    for (c, b) in coeffs.iter().zip(basis) {
        back = back + b.scale(c);
    }
    let scale = m.max_abs().max(1.0);
    (back - m.clone())
        .is_zero_within(tol * scale)
        .then_some(coeffs)
}

/// Gaussian elimination with largest-modulus pivoting. Consumes `a`, `b`.
pub fn solve_linear<S: Scalar>(a: &mut [Vec<S>], b: &mut [S], tol: f64) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| {
            a[p][col]
                .magnitude()
                .partial_cmp(&a[q][col].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].is_zero_within(tol) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                let v = a[col][k].clone() * f.clone();
                a[row][k] = a[row][k].clone() - v;
            }
            let v = b[col].clone() * f;
            b[row] = b[row].clone() - v;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

/// Rank of a small matrix by elimination (exact zero tests in exact mode).
pub fn rank<S: Scalar>(rows: &[Vec<S>], tol: f64) -> usize {
    let mut a: Vec<Vec<S>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pivot) = (r..nrows)
            .filter(|&p| !a[p][col].is_zero_within(tol))
            .max_by(|&p, &q| {
                a[p][col]
                    .magnitude()
                    .partial_cmp(&a[q][col].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        else {
            continue;
        };
        a.swap(r, pivot);
        for row in r + 1..nrows {
            let f = a[row][col].clone() / a[r][col].clone();
            for k in col..ncols {
                let v = a[r][k].clone() * f.clone();
                a[row][k] = a[row][k].clone() - v;
            }
        }
        r += 1;
    }
    r
}

/// A 3x3 matrix tagged with its arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexMatrix3 {
    Exact(QMat),
    Float(CMat),
}

impl ComplexMatrix3 {
    pub fn mode(&self) -> Mode {
        match self {
            ComplexMatrix3::Exact(_) => Mode::Exact,
            ComplexMatrix3::Float(_) => Mode::Float,
        }
    }

    pub fn to_c64(&self) -> CMat {
        match self {
            ComplexMatrix3::Exact(m) => m.to_c64(),
            ComplexMatrix3::Float(m) => m.clone(),
        }
    }
}

impl From<QMat> for ComplexMatrix3 {
    fn from(m: QMat) -> Self {
        ComplexMatrix3::Exact(m)
    }
}

impl From<CMat> for ComplexMatrix3 {
    fn from(m: CMat) -> Self {
        ComplexMatrix3::Float(m)
    }
}

/// Serializable view of a float matrix as `[[re, im]; 3]; 3]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord(pub [[[f64; 2]; 3]; 3]);

impl From<&CMat> for MatrixRecord {
    fn from(m: &CMat) -> Self {
        MatrixRecord(std::array::from_fn(|i| {
            std::array::from_fn(|j| [m.e[i][j].re, m.e[i][j].im])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: [[i64; 3]; 3]) -> QMat {
        QMat::from_ints(rows)
    }

    #[test]
    fn exact_inverse_roundtrip() {
        let m = q([[2, 1, 0], [0, 1, 3], [1, 0, 1]]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(&m * &inv, QMat::identity());
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = q([[1, 2, 3], [2, 4, 6], [0, 0, 1]]);
        assert!(m.inverse(0.0).is_none());
        assert_eq!(m.det(), GaussRat::zero());
    }

    #[test]
    fn determinant_of_diagonal() {
        let m = CMat::diag([2.0.into(), 3.0.into(), 0.5.into()]);
        assert!((m.det() - Complex64::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn decompose_recovers_coefficients() {
        let basis = vec![q([[1, 0, 0], [0, 0, 0], [0, 0, -1]]), QMat::unit(0, 1)];
        let m = basis[0].scale(&GaussRat::from_ratio(3, 2)) + basis[1].scale(&GaussRat::i());
        let c = decompose(&m, &basis, 0.0).unwrap();
        assert_eq!(c[0], GaussRat::from_ratio(3, 2));
        assert_eq!(c[1], GaussRat::i());
        assert!(decompose(&QMat::unit(2, 0), &basis, 0.0).is_none());
    }

    #[test]
    fn rank_counts_independent_rows() {
        let rows = vec![
            vec![GaussRat::from_i64(1), GaussRat::from_i64(2)],
            vec![GaussRat::from_i64(2), GaussRat::from_i64(4)],
        ];
        assert_eq!(rank(&rows, 0.0), 1);
    }
}
