//! Orbital integrals in the upper-triangular model: the diagonal (elliptic)
//! case with its Jacobian reduction, and the one-parameter `theta` family
//! with its singular expansion at `lambda -> 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::bump::{BumpFunction, Coordinate, FamilyParams, Interval};
use crate::matrix::CMat;
use crate::quadrature::{
    genz_malik, integrate, integrate_with_breakpoints, nested3, BoxRegion, QuadratureError,
    QuadratureResult, Tolerance,
};

/// Minimum pairwise eigenvalue separation for the elliptic integrals.
pub const DEGENERACY_GAP: f64 = 1e-6;
/// Largest condition number accepted by `singular_fit`.
pub const MAX_CONDITION: f64 = 1e8;
const GENZ_MALIK_BUDGET: u64 = 200_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitalError {
    #[error("invalid diagonal element: {0}")]
    InvalidGamma(String),
    #[error("eigenvalues closer than {DEGENERACY_GAP} (gap {0})")]
    DegenerateGamma(f64),
    #[error("support of the test function is unbounded along {0}")]
    SupportUnbounded(String),
    #[error("coordinate {0} is not defined on this family")]
    UnsupportedCoordinate(Coordinate),
    #[error("lambda = {0} outside 0 < |lambda| <= 1")]
    LambdaOutOfRange(f64),
    #[error("lambda sequence: {0}")]
    BadSequence(String),
    #[error("least-squares fit is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// `diag(a1, a2, a3)` with `a1 a2 a3 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalGamma {
    a: [f64; 3],
}

impl DiagonalGamma {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self, OrbitalError> {
        let a = [a1, a2, a3];
        if a.iter().any(|x| !x.is_finite() || *x == 0.0) {
            return Err(OrbitalError::InvalidGamma(format!("entries must be finite and nonzero: {a:?}")));
        }
        let det = a1 * a2 * a3;
        if (det - 1.0).abs() > 1e-12 {
            return Err(OrbitalError::InvalidGamma(format!("a1 a2 a3 = {det}, expected 1")));
        }
        Ok(DiagonalGamma { a })
    }

    /// `diag(2 e^s, 1, e^-s / 2)`.
    pub fn geodesic(s: f64) -> Self {
        DiagonalGamma { a: [2.0 * s.exp(), 1.0, 0.5 * (-s).exp()] }
    }

    pub fn entries(&self) -> [f64; 3] {
        self.a
    }

    pub fn min_gap(&self) -> f64 {
        let [a1, a2, a3] = self.a;
        (a1 - a2).abs().min((a2 - a3).abs()).min((a1 - a3).abs())
    }

    /// `|a1 - a2| |a2 - a3| |a1 - a3|`.
    pub fn jacobian(&self) -> f64 {
        let [a1, a2, a3] = self.a;
        (a1 - a2).abs() * (a2 - a3).abs() * (a1 - a3).abs()
    }

    /// `|a1 - a2| |a2 - a3|^2`, the product with the third factor repeated.
    pub fn duplicate_jacobian(&self) -> f64 {
        let [a1, a2, a3] = self.a;
        (a1 - a2).abs() * (a2 - a3).abs().powi(2)
    }

    pub fn swap12(&self) -> Self {
        DiagonalGamma { a: [self.a[1], self.a[0], self.a[2]] }
    }

    pub fn matrix(&self) -> CMat {
        CMat::diag(self.a.map(Complex64::from))
    }

    fn check_gap(&self) -> Result<(), OrbitalError> {
        let gap = self.min_gap();
        if gap < DEGENERACY_GAP {
            Err(OrbitalError::DegenerateGamma(gap))
        } else {
            Ok(())
        }
    }
}

/// Which Jacobian product multiplies the box integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianReading {
    /// `prod_{i<j} |ai - aj|`.
    Product,
    /// `|a1 - a2| |a2 - a3|^2`.
    Duplicate,
}

fn upper_unipotent(x: f64, y: f64, z: f64) -> CMat {
    CMat::from_real([[1.0, x, z], [0.0, 1.0, y], [0.0, 0.0, 1.0]])
}

/// `u^-1 gamma u` for `u = [[1, x, z], [0, 1, y], [0, 0, 1]]`.
pub fn conjugated_matrix(gamma: &DiagonalGamma, x: f64, y: f64, z: f64) -> CMat {
    let u = upper_unipotent(x, y, z);
    let u_inv = upper_unipotent(-x, -y, x * y - z);
    &(&u_inv * &gamma.matrix()) * &u
}

/// `gamma` with `c12, c23, c13` placed above the diagonal.
fn upper_matrix(gamma: &DiagonalGamma, c: [f64; 3]) -> CMat {
    let [a1, a2, a3] = gamma.a;
    CMat::from_real([[a1, c[0], c[2]], [0.0, a2, c[1]], [0.0, 0.0, a3]])
}

const UPPER: [Coordinate; 3] = [Coordinate::Re(0, 1), Coordinate::Re(1, 2), Coordinate::Re(0, 2)];

/// Supports of `f` in the entries `(1,2), (2,3), (1,3)`.
fn upper_supports(f: &BumpFunction) -> Result<Option<[Interval; 3]>, OrbitalError> {
    if let Some(c) = f.coordinates().into_iter().find(Coordinate::is_parameter) {
        return Err(OrbitalError::UnsupportedCoordinate(c));
    }
    let mut out = [Interval { lo: 0.0, hi: 0.0 }; 3];
    for (slot, c) in out.iter_mut().zip(UPPER) {
        match f.coordinate_support(c) {
            None => return Err(OrbitalError::SupportUnbounded(c.to_string())),
            Some(i) if i.lo > i.hi => return Ok(None),
            Some(i) => *slot = i,
        }
    }
    Ok(Some(out))
}

fn scaled_interval(i: Interval, shift: f64, factor: f64) -> Interval {
    let a = (i.lo - shift) / factor;
    let b = (i.hi - shift) / factor;
    Interval { lo: a.min(b), hi: a.max(b) }
}

fn ensure_within(r: QuadratureResult, tol: f64) -> Result<QuadratureResult, OrbitalError> {
    if r.error_estimate <= tol {
        Ok(r)
    } else {
        Err(QuadratureError::NotConverged {
            value: r.value,
            error_estimate: r.error_estimate,
            evaluations: r.evaluations,
        }
        .into())
    }
}

/// `int_U f(u^-1 gamma u) du` by iterated adaptive quadrature over the exact
/// preimage of the support box.
pub fn elliptic_orbital_quadrature(
    gamma: &DiagonalGamma,
    f: &BumpFunction,
    tol: f64,
) -> Result<QuadratureResult, OrbitalError> {
    gamma.check_gap()?;
    let Some([s12, s23, s13]) = upper_supports(f)? else { return Ok(QuadratureResult::ZERO) };
    if f.amplitude == 0.0 {
        return Ok(QuadratureResult::ZERO);
    }
    let [a1, a2, a3] = gamma.a;
    let xr = scaled_interval(s12, 0.0, a1 - a2);
    let yr = scaled_interval(s23, 0.0, a2 - a3);
    let r = nested3(
        xr,
        |_| Some(yr),
        |x, y| Some(scaled_interval(s13, (a3 - a2) * x * y, a1 - a3)),
        |x, y, z| f.eval(&conjugated_matrix(gamma, x, y, z)),
        tol,
    )?;
    ensure_within(r, tol)
}

/// `prod_{i<j} |ai - aj|^-1` times the integral of `f` over its support box
/// in the entries above the diagonal.
pub fn elliptic_orbital_closed_form(
    gamma: &DiagonalGamma,
    f: &BumpFunction,
    tol: f64,
) -> Result<QuadratureResult, OrbitalError> {
    elliptic_orbital_closed_form_with(gamma, f, tol, JacobianReading::Product)
}

pub fn elliptic_orbital_closed_form_with(
    gamma: &DiagonalGamma,
    f: &BumpFunction,
    tol: f64,
    reading: JacobianReading,
) -> Result<QuadratureResult, OrbitalError> {
    gamma.check_gap()?;
    let jac = match reading {
        JacobianReading::Product => gamma.jacobian(),
        JacobianReading::Duplicate => gamma.duplicate_jacobian(),
    };
    let box_integral = upper_box_integral(gamma, f, tol * jac)?;
    ensure_within(box_integral.scale(1.0 / jac), tol)
}

/// `int f(gamma + c12 E12 + c23 E23 + c13 E13) dc` over the support box.
pub fn upper_box_integral(
    gamma: &DiagonalGamma,
    f: &BumpFunction,
    tol: f64,
) -> Result<QuadratureResult, OrbitalError> {
    let Some(s) = upper_supports(f)? else { return Ok(QuadratureResult::ZERO) };
    if f.amplitude == 0.0 {
        return Ok(QuadratureResult::ZERO);
    }
    let region = BoxRegion::from_bounds(s.map(|i| i.lo), s.map(|i| i.hi));
    Ok(genz_malik(|c| f.eval(&upper_matrix(gamma, c)), region, tol, GENZ_MALIK_BUDGET)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    /// `max |v[i+1] - 2 v[i] + v[i-1]| / h^2` over interior points.
    pub max_second_derivative: f64,
}

/// `f^H(gamma) = Delta(gamma) O_gamma(f)` at each grid point, with
/// `Delta = prod_{i<j} |ai - aj|` and `O_gamma` from the iterated quadrature.
pub fn smooth_transfer_fh(
    grid: &[DiagonalGamma],
    f: &BumpFunction,
    tol: f64,
) -> Result<Vec<f64>, OrbitalError> {
    grid.iter()
        .map(|g| Ok(g.jacobian() * elliptic_orbital_quadrature(g, f, tol / g.jacobian())?.value))
        .collect()
}

/// `n` equally spaced points on `diag(2 e^s, 1, e^-s / 2)`, `s in [-0.3, 0.3]`.
pub fn geodesic_grid(n: usize) -> Vec<(f64, DiagonalGamma)> {
    (0..n)
        .map(|k| {
            let s = -0.3 + 0.6 * k as f64 / (n.max(2) - 1) as f64;
            (s, DiagonalGamma::geodesic(s))
        })
        .collect()
}

pub fn transfer_smoothness(f: &BumpFunction, n: usize, tol: f64) -> Result<SmoothnessReport, OrbitalError> {
    let grid = geodesic_grid(n);
    let gammas: Vec<DiagonalGamma> = grid.iter().map(|p| p.1).collect();
    let values = smooth_transfer_fh(&gammas, f, tol)?;
    let s: Vec<f64> = grid.iter().map(|p| p.0).collect();
    let h = if n > 1 { s[1] - s[0] } else { 1.0 };
    let max_second_derivative = values
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / (h * h))
        .fold(0.0, f64::max);
    Ok(SmoothnessReport { s, values, max_second_derivative })
}

/// `[[cos th, t lambda, 0], [-lambda / t, cos th, 0], [0, 0, 1]]` with
/// `cos th = sqrt(1 - lambda^2)`.
pub fn theta_matrix(lambda: f64, t: f64) -> CMat {
    let c = (1.0 - lambda * lambda).max(0.0).sqrt();
    CMat::from_real([[c, t * lambda, 0.0], [-lambda / t, c, 0.0], [0.0, 0.0, 1.0]])
}

fn check_lambda(lambda: f64) -> Result<(), OrbitalError> {
    if lambda.is_finite() && lambda != 0.0 && lambda.abs() <= 1.0 {
        Ok(())
    } else {
        Err(OrbitalError::LambdaOutOfRange(lambda))
    }
}

/// `{t > 0 : lo <= c / t <= hi}` as `(lower, upper)`, `upper` possibly
/// infinite; `None` when empty.
fn reciprocal_preimage(c: f64, i: Interval) -> Option<(f64, f64)> {
    if c > 0.0 {
        if i.hi <= 0.0 {
            return None;
        }
        let upper = if i.lo <= 0.0 { f64::INFINITY } else { c / i.lo };
        Some((c / i.hi, upper))
    } else {
        if i.lo >= 0.0 {
            return None;
        }
        let upper = if i.hi >= 0.0 { f64::INFINITY } else { c / i.hi };
        Some((c / i.lo, upper))
    }
}

/// Exact `t`-support of `t -> f(theta_matrix(lambda, t))`; `None` when it
/// is empty.
pub fn theta_t_support(f: &BumpFunction, lambda: f64) -> Result<Option<Interval>, OrbitalError> {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut bounded_by: Option<Coordinate> = None;
    for c in f.coordinates() {
        let Some(i) = f.coordinate_support(c) else { continue };
        if i.lo > i.hi {
            return Ok(None);
        }
        let range = match c {
            Coordinate::Re(0, 1) => {
                let a = i.lo / lambda;
                let b = i.hi / lambda;
                Some((a.min(b), a.max(b)))
            }
            Coordinate::Re(1, 0) => reciprocal_preimage(-lambda, i),
            Coordinate::T => Some((i.lo, i.hi)),
            _ => continue,
        };
        let Some((a, b)) = range else { return Ok(None) };
        lo = lo.max(a);
        hi = hi.min(b);
        if b.is_finite() {
            bounded_by = Some(c);
        }
    }
    if lo >= hi {
        return Ok(None);
    }
    // Factors that do not depend on t are constant along the family.
    if f.eval_in_family(&theta_matrix(lambda, 1.0), &FamilyParams { t: Some(1.0), lambda: Some(lambda) }) == 0.0
        && f.factors.iter().all(|b| !matches!(b.coord, Coordinate::Re(0, 1) | Coordinate::Re(1, 0) | Coordinate::T))
    {
        return Ok(None);
    }
    if !hi.is_finite() || bounded_by.is_none() {
        return Err(OrbitalError::SupportUnbounded("t".into()));
    }
    Ok(Some(Interval { lo, hi }))
}

/// `F(lambda) = int_0^inf sign(t - 1) f(theta_matrix(lambda, t)) dt`,
/// split at `t = 1`.
pub fn theta_orbital_f(f: &BumpFunction, lambda: f64, tol: f64) -> Result<QuadratureResult, OrbitalError> {
    check_lambda(lambda)?;
    let Some(support) = theta_t_support(f, lambda)? else { return Ok(QuadratureResult::ZERO) };
    if f.amplitude == 0.0 {
        return Ok(QuadratureResult::ZERO);
    }
    let mut points = vec![support.lo];
    if support.lo < 1.0 && 1.0 < support.hi {
        points.push(1.0);
    }
    points.push(support.hi);
    let integrand = |t: f64| {
        let p = FamilyParams { t: Some(t), lambda: Some(lambda) };
        let v = f.eval_in_family(&theta_matrix(lambda, t), &p);
        if t < 1.0 {
            -v
        } else {
            v
        }
    };
    let r = integrate_with_breakpoints(integrand, &points, Tolerance::absolute(tol))?;
    ensure_within(r, tol)
}

/// `int_0^inf f(n(sign * u)) du`, `n(u) = I + u E12`. `None` when `f` reads
/// the family parameter `t`, which has no limit along `n`.
pub fn unipotent_integral(f: &BumpFunction, sign: f64, tol: f64) -> Result<Option<QuadratureResult>, OrbitalError> {
    if f.factors.iter().any(|b| b.coord == Coordinate::T) {
        return Ok(None);
    }
    let Some(i) = f.coordinate_support(Coordinate::Re(0, 1)) else {
        return Err(OrbitalError::SupportUnbounded(Coordinate::Re(0, 1).to_string()));
    };
    let s = if sign < 0.0 { -1.0 } else { 1.0 };
    let (a, b) = if s > 0.0 { (i.lo, i.hi) } else { (-i.hi, -i.lo) };
    let (lo, hi) = (a.max(0.0), b);
    if lo >= hi || f.amplitude == 0.0 {
        return Ok(Some(QuadratureResult::ZERO));
    }
    let params = FamilyParams { t: None, lambda: Some(0.0) };
    let r = integrate(
        |u| {
            let mut n = CMat::identity();
            n.e[0][1] = Complex64::from(s * u);
            f.eval_in_family(&n, &params)
        },
        lo,
        hi,
        Tolerance::absolute(tol),
    )?;
    Ok(Some(ensure_within(r, tol)?))
}

/// One-sided test for a positive slope in a simple linear regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendTest {
    pub slope: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub growth_detected: bool,
}

pub const TREND_LEVEL: f64 = 0.05;

/// Regresses `ys` on `xs` and tests `slope > 0` at level `TREND_LEVEL`.
pub fn trend_test(xs: &[f64], ys: &[f64]) -> TrendTest {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let df = n - 2.0;
    let se = if df > 0.0 && sxx > 0.0 { (sse / df / sxx).sqrt() } else { 0.0 };
    let (t_statistic, p_value) = if se > 0.0 {
        let t = slope / se;
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        (t, 1.0 - dist.cdf(t))
    } else if slope > 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        (0.0, 1.0)
    };
    TrendTest { slope, t_statistic, p_value, growth_detected: p_value < TREND_LEVEL }
}

/// Least-squares fit of `F(lambda)` against `|lambda|^-1`, `ln(1/|lambda|)`, `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularFit {
    pub c_inv: f64,
    pub c_log: f64,
    pub c_0: f64,
    pub residual_max: f64,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub condition_number: f64,
    /// Independent value of the `|lambda|^-1` coefficient, when defined.
    pub unipotent_integral: Option<f64>,
    /// `|c_inv / unipotent_integral - 1|`.
    pub c_inv_relative_error: Option<f64>,
    /// `|residual_k|` regressed on `k = log2(1/|lambda_k|)`.
    pub trend: TrendTest,
}

/// `lambda_k = sign * 2^-k` for `k` in `k_min..=k_max`.
pub fn dyadic_sequence(k_min: i32, k_max: i32, sign: f64) -> Vec<f64> {
    (k_min..=k_max).map(|k| sign.signum() * 2f64.powi(-k)).collect()
}

pub fn singular_fit(f: &BumpFunction, lambdas: &[f64], tol: f64) -> Result<SingularFit, OrbitalError> {
    if lambdas.len() < 8 {
        return Err(OrbitalError::BadSequence(format!("need at least 8 points, got {}", lambdas.len())));
    }
    let sign = lambdas[0].signum();
    for &l in lambdas {
        check_lambda(l)?;
        if l.signum() != sign {
            return Err(OrbitalError::BadSequence("mixed signs".into()));
        }
    }
    if lambdas.windows(2).any(|w| w[1].abs() >= w[0].abs()) {
        return Err(OrbitalError::BadSequence("|lambda| must strictly decrease".into()));
    }
    let values: Vec<f64> = lambdas
        .iter()
        .map(|&l| theta_orbital_f(f, l, tol).map(|r| r.value))
        .collect::<Result<_, _>>()?;

    let m = lambdas.len();
    let mut a = DMatrix::<f64>::from_fn(m, 3, |i, j| {
        let l = lambdas[i].abs();
        match j {
            0 => 1.0 / l,
            1 => (1.0 / l).ln(),
            _ => 1.0,
        }
    });
    let norms: Vec<f64> = (0..3).map(|j| a.column(j).norm()).collect();
    for (j, nrm) in norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / nrm);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition_number = sv.max() / sv.min();
    if !(condition_number <= MAX_CONDITION) {
        return Err(OrbitalError::IllConditioned(condition_number));
    }
    let b = DVector::from_column_slice(&values);
    let coef = svd.solve(&b, 1e-14).map_err(|e| OrbitalError::BadSequence(e.to_string()))?;
    let c = [coef[0] / norms[0], coef[1] / norms[1], coef[2] / norms[2]];
    let residuals: Vec<f64> = lambdas
        .iter()
        .zip(&values)
        .map(|(&l, &v)| {
            let l = l.abs();
            v - (c[0] / l + c[1] * (1.0 / l).ln() + c[2])
        })
        .collect();
    let residual_max = residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let ks: Vec<f64> = lambdas.iter().map(|l| -l.abs().log2()).collect();
    let abs_res: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let trend = trend_test(&ks, &abs_res);

    let unipotent = unipotent_integral(f, sign, tol)?.map(|r| r.value);
    let c_inv_relative_error = unipotent.and_then(|u| (u != 0.0).then(|| (c[0] / u - 1.0).abs()));
    Ok(SingularFit {
        c_inv: c[0],
        c_log: c[1],
        c_0: c[2],
        residual_max,
        lambdas: lambdas.to_vec(),
        values,
        residuals,
        condition_number,
        unipotent_integral: unipotent,
        c_inv_relative_error,
        trend,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parity {
    pub lambda: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    /// `|lambda| (F(lambda) + F(-lambda))`.
    pub g: f64,
    /// `lambda (F(lambda) - F(-lambda))`.
    pub h: f64,
}

pub fn parity_functions(f: &BumpFunction, lambda: f64, tol: f64) -> Result<Parity, OrbitalError> {
    check_lambda(lambda)?;
    let f_plus = theta_orbital_f(f, lambda, tol)?.value;
    let f_minus = theta_orbital_f(f, -lambda, tol)?.value;
    Ok(parity_from_values(lambda, f_plus, f_minus))
}

pub fn parity_from_values(lambda: f64, f_plus: f64, f_minus: f64) -> Parity {
    Parity {
        lambda,
        f_plus,
        f_minus,
        g: lambda.abs() * (f_plus + f_minus),
        h: lambda * (f_plus - f_minus),
    }
}

/// Random `(gamma, f)` for the elliptic comparison: `gamma` with pairwise
/// gaps at least `min_gap`, and an upper-triangular bump with centers in
/// `[-0.5, 0.5]` and radii in `[0.3, 1]`.
pub fn random_elliptic_case<R: Rng + ?Sized>(rng: &mut R, min_gap: f64) -> (DiagonalGamma, BumpFunction) {
    use crate::bump::BumpFactor;
    let gamma = loop {
        let a1 = rng.random_range(0.25..4.0);
        let a2 = rng.random_range(0.25..4.0);
        let a3 = 1.0 / (a1 * a2);
        if let Ok(g) = DiagonalGamma::new(a1, a2, a3) {
            if g.min_gap() >= min_gap {
                break g;
            }
        }
    };
    let factors = UPPER
        .iter()
        .map(|&c| {
            BumpFactor::new(c, rng.random_range(-0.5..0.5), rng.random_range(0.3..1.0)).expect("positive radius")
        })
        .collect();
    (gamma, BumpFunction::new(1.0, factors).expect("finite amplitude"))
}

/// Reference test function for the `theta` family.
pub fn reference_theta_bump() -> BumpFunction {
    use crate::bump::BumpFactor;
    BumpFunction::new(
        1.0,
        vec![
            BumpFactor::new(Coordinate::Re(0, 1), 0.5, 1.0).expect("valid"),
            BumpFactor::new(Coordinate::Re(1, 0), 0.0, 0.5).expect("valid"),
            BumpFactor::new(Coordinate::Re(0, 0), 1.0, 1.25).expect("valid"),
        ],
    )
    .expect("valid")
}
