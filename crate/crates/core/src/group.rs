//! Group elements of SU(2,1): membership, exponential, Cartan involution
//! and the Iwasawa decomposition `g = m a u k`.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{i21, AlgebraElement, AlgebraError, Generator};
use crate::matrix::{decompose, CMat, ComplexMatrix3, Mat3};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub matrix: CMat,
    pub certified: bool,
}

impl GroupElement {
    /// Wrap a matrix, certifying it with [`in_group`] at `tol`.
    pub fn certify(matrix: CMat, tol: f64) -> Self {
        let certified = in_group(&matrix, tol);
        GroupElement { matrix, certified }
    }

    pub fn identity() -> Self {
        GroupElement {
            matrix: CMat::identity(),
            certified: true,
        }
    }
}

/// `g^dagger I21 g = I21` and `det g = 1`, both within `tol`.
pub fn in_group(g: &CMat, tol: f64) -> bool {
    let j = i21::<Complex64>();
    let form = g.adjoint() * j.clone() * g.clone();
    form.max_abs_diff(&j) <= tol && (g.det() - Complex64::new(1.0, 0.0)).norm() <= tol
}

/// `theta(g) = (g^dagger)^{-1}`.
pub fn cartan_involution_group(g: &GroupElement) -> Result<GroupElement, AlgebraError> {
    let inv = g
        .matrix
        .adjoint()
        .inverse(f64::MIN_POSITIVE)
        .ok_or(AlgebraError::Singular)?;
    Ok(GroupElement {
        matrix: inv,
        certified: g.certified,
    })
}

const PADE_DEGREE: usize = 8;
/// Scaling threshold on the 1-norm; the [8/8] Pade error at this radius is
/// below 1e-20.
const PADE_RADIUS: f64 = 0.5;

fn pade_coefficients() -> [f64; PADE_DEGREE + 1] {
    // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
    let q = PADE_DEGREE;
    let fact = |n: usize| (1..=n).map(|x| x as f64).product::<f64>();
    std::array::from_fn(|k| fact(2 * q - k) * fact(q) / (fact(2 * q) * fact(k) * fact(q - k)))
}

/// `exp(x)` by scaling and squaring with an [8/8] Pade approximant.
/// Nilpotent inputs (`x^3 = 0`) use the terminating series.
pub fn mat_exp_matrix(x: &CMat) -> CMat {
    let x2 = x * x;
    let x3 = &x2 * x;
    let n = x.max_abs();
    if x3.max_abs() <= 64.0 * f64::EPSILON * n * n * n {
        let half = Complex64::new(0.5, 0.0);
        return CMat::identity() + x.clone() + x2.scale(&half);
    }
    let norm = x.norm1();
    let s = if norm > PADE_RADIUS {
        (norm / PADE_RADIUS).log2().ceil() as i32
    } else {
        0
    };
    let a = x.scale(&Complex64::new(2f64.powi(-s), 0.0));
    let c = pade_coefficients();
    let mut num = CMat::zero();
    let mut den = CMat::zero();
    let mut power = CMat::identity();
    for (k, ck) in c.iter().enumerate() {
        let term = power.scale(&Complex64::new(*ck, 0.0));
        num = num + term.clone();
        den = if k % 2 == 0 { den + term } else { den - term };
        power = &power * &a;
    }
    let mut r = &den.inverse(0.0).expect("Pade denominator is invertible") * &num;
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Exponential of a float-mode algebra element; certified at `tol`.
pub fn mat_exp(x: &AlgebraElement, tol: f64) -> Result<GroupElement, AlgebraError> {
    let ComplexMatrix3::Float(m) = &x.matrix else {
        return Err(AlgebraError::NotFloat);
    };
    Ok(GroupElement::certify(mat_exp_matrix(m), tol))
}

/// Random su(2,1) element: `I21 S` with `S` skew-Hermitian, made traceless.
/// Entries are standard-normal-sized.
pub fn random_algebra_matrix<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    let a = CMat::from_fn(|_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let skew = (a.clone() - a.adjoint()).scale(&Complex64::new(0.5, 0.0));
    let x = i21::<Complex64>() * skew;
    let shift = x.trace() / Complex64::new(3.0, 0.0);
    x - CMat::identity().scale(&shift)
}

pub fn random_group_element<R: Rng + ?Sized>(rng: &mut R, tol: f64) -> GroupElement {
    GroupElement::certify(mat_exp_matrix(&random_algebra_matrix(rng)), tol)
}

/// `exp(s H)` in the split torus.
pub fn split_torus(s: f64) -> CMat {
    let (c, h) = (Complex64::new(s.cosh(), 0.0), Complex64::new(s.sinh(), 0.0));
    let mut m = CMat::identity();
    m.e[0][0] = c;
    m.e[2][2] = c;
    m.e[0][2] = h;
    m.e[2][0] = h;
    m
}

/// `exp(x X + y Y' + z Z')`, exact terminating series.
pub fn unipotent<S: Scalar>(x: S, y: S, z: S) -> Mat3<S> {
    let n = Generator::X.corrected::<S>().scale(&x)
        + Generator::Y.corrected::<S>().scale(&y)
        + Generator::Z.corrected::<S>().scale(&z);
    let n2 = &n * &n;
    Mat3::identity() + n + n2.scale(&S::from_ratio(1, 2))
}

/// `exp(phi T') = diag(c, c^-2, c)` with `c = e^{i phi / 3}`.
pub fn compact_torus_m(c: Complex64) -> CMat {
    CMat::diag([c, (c * c).inv(), c])
}

#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    pub m: GroupElement,
    pub a: GroupElement,
    pub u: GroupElement,
    pub k: GroupElement,
    /// Split-torus parameter `s` with `a = exp(s H)`.
    pub a_parameter: f64,
    /// Coordinates `(x, y, z)` of `u = exp(x X + y Y' + z Z')`.
    pub u_coordinates: [f64; 3],
}

impl IwasawaFactors {
    pub fn recompose(&self) -> CMat {
        &(&(&self.m.matrix * &self.a.matrix) * &self.u.matrix) * &self.k.matrix
    }
}

/// Orthonormal basis adapted to `H`: `f1 = (e1+e3)/sqrt2, f2 = e2,
/// f3 = (e1-e3)/sqrt2`. The Borel subgroup is upper triangular in it.
fn adapted_basis() -> CMat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_real([[r, 0.0, r], [0.0, 1.0, 0.0], [r, 0.0, -r]])
}

/// Factor `P = R R^dagger` with `R` upper triangular, positive diagonal.
fn reverse_cholesky(p: &CMat) -> Option<CMat> {
    let mut r = CMat::zero();
    for j in (0..3).rev() {
        let mut d = p.e[j][j].re;
        for k in j + 1..3 {
            d -= r.e[j][k].norm_sqr();
        }
        if d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        r.e[j][j] = Complex64::new(d, 0.0);
        for i in 0..j {
            let mut v = p.e[i][j];
            for k in j + 1..3 {
                v -= r.e[i][k] * r.e[j][k].conj();
            }
            r.e[i][j] = v / d;
        }
    }
    Some(r)
}

/// Canonical `g = m a u k`: `a = exp(sH)` (positive diagonal in the adapted
/// basis), `u` unipotent, `k` in K with `k_33 = 1`; the leftover U(1) phase
/// of K is carried by `m` in M.
pub fn iwasawa_decompose(g: &GroupElement, tol: f64) -> Result<IwasawaFactors, AlgebraError> {
    if !in_group(&g.matrix, tol) {
        return Err(AlgebraError::NotMember);
    }
    let c = adapted_basis();
    let p = &g.matrix * &g.matrix.adjoint();
    let pf = &(&c.adjoint() * &p) * &c;
    let rf = reverse_cholesky(&pf).ok_or(AlgebraError::NotMember)?;
    let s = rf.e[0][0].re.ln();
    let b = &(&c * &rf) * &c.adjoint();
    let a = split_torus(s);
    let u = &split_torus(-s) * &b;
    let k0 = &b.inverse(0.0).ok_or(AlgebraError::Singular)? * &g.matrix;
    let k33 = k0.e[2][2];
    let phase = k33 / k33.norm();
    let m = compact_torus_m(phase);
    let m_inv = compact_torus_m(phase.conj());
    let k = &m_inv * &k0;
    let u = &(&m_inv * &u) * &m;
    let log_u = u.clone() - CMat::identity();
    let log_u = log_u.clone() - (&log_u * &log_u).scale(&Complex64::new(0.5, 0.0));
    let basis: Vec<CMat> = [Generator::X, Generator::Y, Generator::Z]
        .iter()
        .map(|g| g.corrected())
        .collect();
    let coords = decompose(&log_u, &basis, tol).ok_or(AlgebraError::NotMember)?;
    let cert = |m: CMat| GroupElement::certify(m, tol);
    Ok(IwasawaFactors {
        m: cert(m),
        a: cert(a),
        u: cert(u),
        k: cert(k),
        a_parameter: s,
        u_coordinates: [coords[0].re, coords[1].re, coords[2].re],
    })
}
