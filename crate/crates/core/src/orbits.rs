//! Coadjoint action of the Borel subgroup on `b* = span(T*, X*, Y*, Z*)`,
//! the orbit classifier and the polarization check.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{i21, BasisChoice, Generator};
use crate::matrix::{decompose, rank, Mat3, QMat};
use crate::scalar::{rational_from_f64, GaussRat, Scalar};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("element does not normalize span(T, X, Y, Z) or is not in SU(2,1)")]
    NonBorel,
    #[error("functional has a non-finite coefficient")]
    NonFinite,
}

/// `t T* + x X* + y Y* + z Z*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BFunctional {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BFunctional {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        BFunctional { t, x, y, z }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        BFunctional::new(a[0], a[1], a[2], a[3])
    }
}

/// Basis of `m + u` in the order matching `(t, x, y, z)`.
fn mu_basis<S: Scalar>(choice: BasisChoice) -> Vec<Mat3<S>> {
    [Generator::T, Generator::X, Generator::Y, Generator::Z]
        .iter()
        .map(|&g| choice.matrix(g))
        .collect()
}

fn is_member<S: Scalar>(b: &Mat3<S>, tol: f64) -> bool {
    let j = i21::<S>();
    let form = b.adjoint() * j.clone() * b.clone();
    (form - j).is_zero_within(tol) && (b.det() - S::one()).is_zero_within(tol)
}

/// Matrix `c` with `Ad(b^-1) e_j = sum_k c[j][k] e_k`, so that the dual
/// action is `(Ad*_b F)_j = sum_k c[j][k] f_k`.
pub fn coadjoint_matrix<S: Scalar>(
    b: &Mat3<S>,
    choice: BasisChoice,
    tol: f64,
) -> Result<[[S; 4]; 4], OrbitError> {
    if !is_member(b, tol) {
        return Err(OrbitError::NonBorel);
    }
    let b_inv = b.inverse(tol).ok_or(OrbitError::NonBorel)?;
    let basis = mu_basis::<S>(choice);
    let mut c: [[S; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
    for (j, e) in basis.iter().enumerate() {
        let ad = &(&b_inv * e) * b;
        let coeffs = decompose(&ad, &basis, tol).ok_or(OrbitError::NonBorel)?;
        for (k, v) in coeffs.into_iter().enumerate() {
            // Real group, real span: coefficients must be real.
            let z = v.to_c64();
            if !(v.clone() - v.conj()).is_zero_within(tol * z.norm().max(1.0)) {
                return Err(OrbitError::NonBorel);
            }
            c[j][k] = v;
        }
    }
    Ok(c)
}

pub fn coadjoint_act_with(
    b: &Mat3<Complex64>,
    f: &BFunctional,
    choice: BasisChoice,
    tol: f64,
) -> Result<BFunctional, OrbitError> {
    if f.as_array().iter().any(|v| !v.is_finite()) {
        return Err(OrbitError::NonFinite);
    }
    let c = coadjoint_matrix(b, choice, tol)?;
    let fv = f.as_array();
    Ok(BFunctional::from_array(std::array::from_fn(|j| {
        (0..4).map(|k| c[j][k].re * fv[k]).sum()
    })))
}

/// Coadjoint action in the corrected basis.
pub fn coadjoint_act(b: &Mat3<Complex64>, f: &BFunctional) -> Result<BFunctional, OrbitError> {
    coadjoint_act_with(b, f, BasisChoice::Corrected, 1e-10)
}

/// Exact coadjoint action on rational functionals.
pub fn coadjoint_act_exact(
    b: &QMat,
    f: &[BigRational; 4],
    choice: BasisChoice,
) -> Result<[BigRational; 4], OrbitError> {
    let c = coadjoint_matrix(b, choice, 0.0)?;
    Ok(std::array::from_fn(|j| {
        (0..4).fold(BigRational::zero(), |acc, k| acc + c[j][k].re.clone() * f[k].clone())
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum OrbitClass {
    OmegaPlus,
    OmegaMinus,
    Cylinder { alpha: f64 },
    HalfPlaneXPos,
    HalfPlaneXNeg,
    HalfPlaneYPos,
    HalfPlaneYNeg,
    Origin,
}

impl OrbitClass {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitClass::OmegaPlus => "omega_plus",
            OrbitClass::OmegaMinus => "omega_minus",
            OrbitClass::Cylinder { .. } => "cylinder",
            OrbitClass::HalfPlaneXPos => "half_plane_x_pos",
            OrbitClass::HalfPlaneXNeg => "half_plane_x_neg",
            OrbitClass::HalfPlaneYPos => "half_plane_y_pos",
            OrbitClass::HalfPlaneYNeg => "half_plane_y_neg",
            OrbitClass::Origin => "origin",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            OrbitClass::Cylinder { alpha } => Some(*alpha),
            _ => None,
        }
    }

    /// Same variant, and cylinder parameters within `tol` relative.
    pub fn same_class(&self, other: &OrbitClass, tol: f64) -> bool {
        match (self, other) {
            (OrbitClass::Cylinder { alpha: a }, OrbitClass::Cylinder { alpha: b }) => {
                (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
            }
            _ => self == other,
        }
    }
}

pub fn classify_orbit(f: &BFunctional, tol: f64) -> OrbitClass {
    let BFunctional { x, y, z, .. } = *f;
    if z > tol {
        return OrbitClass::OmegaPlus;
    }
    if z < -tol {
        return OrbitClass::OmegaMinus;
    }
    let xy = x * y;
    let (x_out, y_out) = (x.abs() > tol, y.abs() > tol);
    if xy.abs() > tol {
        return OrbitClass::Cylinder { alpha: xy };
    }
    match (x_out, y_out) {
        (true, false) if x > 0.0 => OrbitClass::HalfPlaneXPos,
        (true, false) => OrbitClass::HalfPlaneXNeg,
        (false, true) if y > 0.0 => OrbitClass::HalfPlaneYPos,
        (false, true) => OrbitClass::HalfPlaneYNeg,
        (false, false) => OrbitClass::Origin,
        // Both coordinates are visible but their product is below tol.
        (true, true) => OrbitClass::Cylinder { alpha: xy },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationCheck {
    /// `F([l, l]) = 0`.
    pub isotropic: bool,
    pub dim_l: usize,
    /// Dimension of the radical of `B_F(a, b) = F([a, b])` on `u_C`.
    pub radical_dim: usize,
    pub dimension_ok: bool,
    /// `i F([l, conj l]) > 0` for `l = X +- i Y'`.
    pub positive: bool,
    pub holds: bool,
}

/// Exact check for `l = span(X +- i Y', Z')` in the corrected basis.
pub fn polarization_check(sign: PolarizationSign, f: &BFunctional) -> Result<PolarizationCheck, OrbitError> {
    let q = |v: f64| rational_from_f64(v).ok_or(OrbitError::NonFinite);
    let coeffs = [q(f.t)?, q(f.x)?, q(f.y)?, q(f.z)?];
    let basis = mu_basis::<GaussRat>(BasisChoice::Corrected);
    // Complex-linear extension of F to m_C + u_C.
    let eval = |m: &QMat| -> GaussRat {
        let c = decompose(m, &basis, 0.0).expect("brackets of u stay in m + u");
        c.into_iter()
            .zip(&coeffs)
            .fold(<GaussRat as Scalar>::zero(), |acc, (ci, fi)| {
                acc + ci * GaussRat::new(fi.clone(), BigRational::zero())
            })
    };
    let x = Generator::X.corrected::<GaussRat>();
    let y = Generator::Y.corrected::<GaussRat>();
    let z = Generator::Z.corrected::<GaussRat>();
    let s = match sign {
        PolarizationSign::Plus => GaussRat::i(),
        PolarizationSign::Minus => -GaussRat::i(),
    };
    let l1 = x.clone() + y.scale(&s);
    // Conjugation with respect to the real form su(2,1), not entrywise.
    let l1_bar = x.clone() - y.scale(&s);
    let l_basis = [l1.clone(), z.clone()];
    let isotropic = l_basis
        .iter()
        .all(|a| l_basis.iter().all(|b| eval(&a.commutator(b)).is_zero_within(0.0)));
    let u_basis = [x, y, z];
    let form: Vec<Vec<GaussRat>> = u_basis
        .iter()
        .map(|a| u_basis.iter().map(|b| eval(&a.commutator(b))).collect())
        .collect();
    let radical_dim = 3 - rank(&form, 0.0);
    let dim_l = 2;
    let dimension_ok = 2 * dim_l == 3 + radical_dim;
    let pos = eval(&l1.commutator(&l1_bar)) * GaussRat::i();
    let positive = pos.im.is_zero() && pos.re.is_positive();
    Ok(PolarizationCheck {
        isotropic,
        dim_l,
        radical_dim,
        dimension_ok,
        positive,
        holds: isotropic && dimension_ok,
    })
}

pub fn is_polarization(sign: PolarizationSign, f: &BFunctional) -> bool {
    polarization_check(sign, f).map(|c| c.holds).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{compact_torus_m, split_torus, unipotent};
    use crate::matrix::CMat;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn identity_acts_trivially() {
        let f = BFunctional::new(0.3, -1.0, 2.0, 0.7);
        let g = coadjoint_act(&CMat::identity(), &f).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn center_coefficient_fixed_by_unipotents() {
        let f = BFunctional::new(0.0, 0.0, 0.0, 1.0);
        let u = unipotent(c(0.7), c(-1.3), c(2.0));
        let g = coadjoint_act(&u, &f).unwrap();
        assert!((g.z - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unipotent_translates_xy_when_z_nonzero() {
        let f = BFunctional::new(0.0, 0.0, 0.0, 1.0);
        let u = unipotent(c(1.0), c(0.0), c(0.0));
        let g = coadjoint_act(&u, &f).unwrap();
        assert!(g.x.abs() > 1e-6 || g.y.abs() > 1e-6);
    }

    #[test]
    fn exact_cylinder_parameter_invariant() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let g = |n: i64, d: i64| GaussRat::new(r(n, d), BigRational::zero());
        let u = unipotent(g(3, 2), g(-5, 7), g(1, 3));
        let f = [r(2, 1), r(-3, 4), r(5, 3), r(0, 1)];
        let out = coadjoint_act_exact(&u, &f, BasisChoice::Corrected).unwrap();
        assert_eq!(out[1].clone() * out[2].clone(), f[1].clone() * f[2].clone());
        assert!(out[3].is_zero());
    }

    #[test]
    fn non_borel_rejected() {
        // A K-element that mixes e3 with e1 is outside the Borel normalizer.
        let k = CMat::from_real([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        let f = BFunctional::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(coadjoint_act(&k, &f), Err(OrbitError::NonBorel));
        let d = CMat::diag([c(2.0), c(1.0), c(0.5)]);
        assert_eq!(coadjoint_act(&d, &f), Err(OrbitError::NonBorel));
    }

    #[test]
    fn split_torus_rescales_cylinder_parameter() {
        let s = 0.4;
        let f = BFunctional::new(0.0, 1.0, 2.0, 0.0);
        let g = coadjoint_act(&split_torus(s), &f).unwrap();
        let before = classify_orbit(&f, DEFAULT_TOL).alpha().unwrap();
        let after = classify_orbit(&g, DEFAULT_TOL).alpha().unwrap();
        assert!((after / before - (-2.0 * s).exp()).abs() < 1e-12);
    }

    #[test]
    fn compact_torus_rotates_half_planes() {
        // exp(phi T') with phi = pi/2 is diag(c, c^-2, c), c = e^{i pi/6}.
        let m = compact_torus_m(Complex64::from_polar(1.0, std::f64::consts::PI / 6.0));
        let f = BFunctional::new(0.0, 1.0, 0.0, 0.0);
        let g = coadjoint_act(&m, &f).unwrap();
        assert_eq!(classify_orbit(&f, DEFAULT_TOL), OrbitClass::HalfPlaneXPos);
        let moved = classify_orbit(&g, DEFAULT_TOL);
        assert!(matches!(moved, OrbitClass::HalfPlaneYPos | OrbitClass::HalfPlaneYNeg), "{moved:?}");
    }

    #[test]
    fn classifier_examples() {
        let k = |t, x, y, z| classify_orbit(&BFunctional::new(t, x, y, z), DEFAULT_TOL);
        assert_eq!(k(1.0, 2.0, 3.0, 0.5), OrbitClass::OmegaPlus);
        assert_eq!(k(0.0, 1.0, 1.0, 0.0), OrbitClass::Cylinder { alpha: 1.0 });
        assert_eq!(k(5.0, -2.0, 0.0, 0.0), OrbitClass::HalfPlaneXNeg);
        assert_eq!(k(0.0, 0.0, 0.0, -1.0), OrbitClass::OmegaMinus);
        assert_eq!(k(0.0, 1.0, -1.0, 0.0), OrbitClass::Cylinder { alpha: -1.0 });
        assert_eq!(k(3.0, 0.0, 0.0, 0.0), OrbitClass::Origin);
        assert_eq!(k(0.0, 0.0, 4.0, 0.0), OrbitClass::HalfPlaneYPos);
    }

    #[test]
    fn polarization_examples() {
        let zstar = BFunctional::new(0.0, 0.0, 0.0, 1.0);
        let p = polarization_check(PolarizationSign::Plus, &zstar).unwrap();
        assert!(p.holds && p.positive);
        assert_eq!(p.radical_dim, 1);
        let m = polarization_check(PolarizationSign::Minus, &BFunctional::new(0.0, 0.0, 0.0, -1.0)).unwrap();
        assert!(m.holds && m.positive);
        let origin = polarization_check(PolarizationSign::Plus, &BFunctional::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(origin.isotropic);
        assert_eq!(origin.radical_dim, 3);
        assert!(!origin.holds);
        let xstar = polarization_check(PolarizationSign::Plus, &BFunctional::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(xstar.isotropic);
        assert!(!xstar.holds);
    }
}
