//! The suites run by `verify-all`. Each suite draws from its own ChaCha
//! stream of the configured seed, so results do not depend on scheduling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use su21::algebra::{audit_basis_exact, audit_basis_float, theta_involution_exact, BasisChoice};
use su21::endoscopy::{
    calibrate, calibration_grid, evaluation_grid, fiber_check, pairing_inversion_check, sensitivity,
    transfer_identity_check, Conventions, EllipticElement, PairingTable,
};
use su21::group::{in_group, iwasawa_decompose, mat_exp_matrix, random_algebra_matrix, unipotent, GroupElement};
use su21::matrix::CMat;
use su21::orbital::{
    dyadic_sequence, elliptic_orbital_closed_form, elliptic_orbital_quadrature, random_elliptic_case,
    reference_theta_bump, singular_fit,
};
use su21::orbits::{classify_orbit, coadjoint_act, coadjoint_act_exact, BFunctional};
use su21::roots::{classify_parameter, enumerate_parameters, pair, Coroot, ParameterClass, Weight};
use su21::scalar::GaussRat;

use crate::config::RunConfig;

/// Classifier tolerance for the orbit-invariance suite.
pub const ORBIT_TOL: f64 = 1e-9;
/// Relative agreement required between quadrature and closed form.
pub const ELLIPTIC_REL_TOL: f64 = 1e-6;
/// Smallest factor by which the duplicate Jacobian must miss on some pair.
pub const DUPLICATE_MIN_FACTOR: f64 = 1.5;
/// Eigenvalue gap for the sampled elliptic elements.
pub const ELLIPTIC_MIN_GAP: f64 = 0.1;
/// Relative error allowed between the fitted `|lambda|^-1` coefficient and
/// the unipotent integral.
pub const THETA_REL_TOL: f64 = 0.05;
/// Residual every single-convention flip must exceed.
pub const NON_VACUITY: f64 = 0.1;

pub fn reference_mu() -> Weight {
    Weight::from_ints([1, -3, 2]).expect("sums to zero")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Structure,
    BasisAudit,
    Group,
    Orbits,
    Elliptic,
    Theta,
    Transfer,
    Inversion,
    Parameters,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Structure,
        Suite::BasisAudit,
        Suite::Group,
        Suite::Orbits,
        Suite::Elliptic,
        Suite::Theta,
        Suite::Transfer,
        Suite::Inversion,
        Suite::Parameters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::BasisAudit => "basis_audit",
            Suite::Group => "group",
            Suite::Orbits => "orbits",
            Suite::Elliptic => "elliptic",
            Suite::Theta => "theta",
            Suite::Transfer => "transfer",
            Suite::Inversion => "inversion",
            Suite::Parameters => "parameters",
        }
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).expect("listed") as u64
    }

    fn rng(self, cfg: &RunConfig) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(self.stream());
        rng
    }

    pub fn run(self, cfg: &RunConfig) -> SuiteResult {
        let mut r = SuiteResult::new(self.name());
        match self {
            Suite::Structure => structure(&mut r),
            Suite::BasisAudit => basis_audit(&mut r),
            Suite::Group => group(&mut r, cfg, &mut self.rng(cfg)),
            Suite::Orbits => orbits(&mut r, cfg, &mut self.rng(cfg)),
            Suite::Elliptic => elliptic(&mut r, cfg, &mut self.rng(cfg)),
            Suite::Theta => theta(&mut r, cfg),
            Suite::Transfer => transfer(&mut r, cfg, &mut self.rng(cfg)),
            Suite::Inversion => inversion(&mut r, &mut self.rng(cfg)),
            Suite::Parameters => parameters(&mut r, cfg),
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub metrics: BTreeMap<&'static str, Value>,
    /// One line per failed check.
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, passed: true, metrics: BTreeMap::new(), failures: Vec::new() }
    }

    fn metric(&mut self, key: &'static str, v: impl Serialize) {
        self.metrics.insert(key, serde_json::to_value(v).expect("metric serializes"));
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.passed = false;
            self.failures.push(what());
        }
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.passed = false;
        self.failures.push(format!("error: {e}"));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub suites: Vec<SuiteResult>,
    pub failed: Vec<&'static str>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Runs every suite, in parallel, and reports them in `Suite::ALL` order.
pub fn verify_all(cfg: &RunConfig) -> VerifyReport {
    let suites: Vec<SuiteResult> = Suite::ALL.par_iter().map(|s| s.run(cfg)).collect();
    let failed = suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    VerifyReport { config: cfg.clone(), suites, failed }
}

fn structure(r: &mut SuiteResult) {
    let audit = audit_basis_exact();
    for c in &audit.printed_identities {
        r.check(c.holds, || format!("printed relation {} fails exactly (residual {})", c.identity, c.residual));
    }
    for c in &audit.corrected_identities {
        r.check(c.holds, || format!("corrected relation {} fails exactly (residual {})", c.identity, c.residual));
    }
    let theta = theta_involution_exact();
    r.check(theta, || "theta is not an exact involution".into());
    r.metric("printed_identities", &audit.printed_identities);
    r.metric("corrected_identities", &audit.corrected_identities);
    r.metric("theta_involution", theta);
}

fn basis_audit(r: &mut SuiteResult) {
    let exact = audit_basis_exact();
    let float = audit_basis_float();
    r.check(exact.verdicts() == float.verdicts(), || "exact and float audits disagree".into());
    let mut membership = BTreeMap::new();
    for g in &exact.generators {
        let expect_member = matches!(g.name.as_str(), "X" | "H");
        r.check(g.member == expect_member, || format!("{}: member = {}", g.name, g.member));
        r.check(g.i_twist_member != expect_member, || format!("{}: i-twist member = {}", g.name, g.i_twist_member));
        membership.insert(g.name.clone(), json!({"member": g.member, "i_twist_member": g.i_twist_member}));
    }
    let heisenberg = exact.corrected_identities.iter().find(|c| c.identity == "[X,Y'] = Z'");
    r.check(heisenberg.is_some_and(|c| c.holds && c.residual == 0.0), || "[X,Y'] = Z' fails".into());
    r.metric("membership", membership);
}

fn group(r: &mut SuiteResult, cfg: &RunConfig, rng: &mut ChaCha8Rng) {
    let mut outside = 0usize;
    for _ in 0..cfg.group_samples {
        let x = random_algebra_matrix(rng);
        let s = rng.random_range(-1.0..=1.0);
        if !in_group(&mat_exp_matrix(&x.scale(&Complex64::new(s, 0.0))), cfg.structure_tol) {
            outside += 1;
        }
    }
    r.check(outside == 0, || format!("{outside} exponentials left the group"));
    let (mut max_recompose, mut max_unitarity) = (0.0f64, 0.0f64);
    for _ in 0..cfg.iwasawa_samples {
        let g = GroupElement::certify(mat_exp_matrix(&random_algebra_matrix(rng)), cfg.structure_tol);
        match iwasawa_decompose(&g, cfg.structure_tol) {
            Ok(p) => {
                max_recompose = max_recompose.max(p.recompose().max_abs_diff(&g.matrix));
                let k = &p.k.matrix;
                max_unitarity = max_unitarity.max((&k.adjoint() * k).max_abs_diff(&CMat::identity()));
            }
            Err(e) => r.error(e),
        }
    }
    r.check(max_recompose <= cfg.structure_tol, || format!("Iwasawa recomposition error {max_recompose:e}"));
    r.check(max_unitarity <= cfg.structure_tol, || format!("k is unitary only to {max_unitarity:e}"));
    r.metric("exp_samples", cfg.group_samples);
    r.metric("exp_outside_group", outside);
    r.metric("iwasawa_samples", cfg.iwasawa_samples);
    r.metric("iwasawa_max_recompose_error", max_recompose);
    r.metric("iwasawa_max_unitarity_error", max_unitarity);
}

/// Coordinates exactly 0 with probability 1/4, otherwise of size at least
/// 0.01, so that every stratum is sampled and none sits on a threshold.
fn stratified_coefficient(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.25) {
        0.0
    } else {
        let v = rng.random_range(0.01..3.0);
        if rng.random_bool(0.5) {
            -v
        } else {
            v
        }
    }
}

pub fn random_orbit_pair(rng: &mut ChaCha8Rng) -> ([f64; 3], BFunctional) {
    let b = [(); 3].map(|_| rng.random_range(-2.0..2.0));
    let f = BFunctional::from_array([(); 4].map(|_| stratified_coefficient(rng)));
    (b, f)
}

fn orbits(r: &mut SuiteResult, cfg: &RunConfig, rng: &mut ChaCha8Rng) {
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut mismatches = Vec::new();
    let mut max_alpha_drift = 0.0f64;
    for i in 0..cfg.orbit_samples {
        let (b, f) = random_orbit_pair(rng);
        let before = classify_orbit(&f, ORBIT_TOL);
        *counts.entry(before.name()).or_default() += 1;
        match coadjoint_act(&unipotent(c(b[0]), c(b[1]), c(b[2])), &f) {
            Ok(g) => {
                let after = classify_orbit(&g, ORBIT_TOL);
                if !before.same_class(&after, ORBIT_TOL) {
                    mismatches.push(format!("sample {i}: {} -> {}", before.name(), after.name()));
                }
                if f.z == 0.0 {
                    let drift = (g.x * g.y - f.x * f.y).abs() / (f.x * f.y).abs().max(1.0);
                    max_alpha_drift = max_alpha_drift.max(drift);
                }
            }
            Err(e) => r.error(e),
        }
    }
    r.check(mismatches.is_empty(), || format!("{} class changes, first {}", mismatches.len(), mismatches[0]));
    r.check(max_alpha_drift <= ORBIT_TOL, || format!("xy drifts by {max_alpha_drift:e} on z = 0"));

    // Exact arithmetic: xy is unchanged, not merely close.
    let q = |n: i64, d: i64| num_rational::BigRational::new(n.into(), d.into());
    let mut exact_failures = 0;
    for _ in 0..50 {
        let mut draw = || q(rng.random_range(-40..=40), rng.random_range(1..=9));
        let u = unipotent(
            GaussRat::new(draw(), q(0, 1)),
            GaussRat::new(draw(), q(0, 1)),
            GaussRat::new(draw(), q(0, 1)),
        );
        let f = [draw(), draw(), draw(), q(0, 1)];
        match coadjoint_act_exact(&u, &f, BasisChoice::Corrected) {
            Ok(g) if g[1].clone() * g[2].clone() == f[1].clone() * f[2].clone() => {}
            Ok(_) => exact_failures += 1,
            Err(e) => r.error(e),
        }
    }
    r.check(exact_failures == 0, || format!("{exact_failures} exact samples changed xy"));
    r.metric("samples", cfg.orbit_samples);
    r.metric("class_counts", counts);
    r.metric("class_changes", mismatches.len());
    r.metric("max_cylinder_drift", max_alpha_drift);
    r.metric("exact_cylinder_samples", 50);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct EllipticRow {
    a: [f64; 3],
    quadrature: f64,
    quadrature_error: f64,
    closed_form: f64,
    relative_difference: f64,
    /// How far the duplicate-Jacobian reading misses, as a ratio >= 1.
    duplicate_factor: f64,
}

fn elliptic(r: &mut SuiteResult, cfg: &RunConfig, rng: &mut ChaCha8Rng) {
    let cases: Vec<_> = (0..cfg.elliptic_pairs).map(|_| random_elliptic_case(rng, ELLIPTIC_MIN_GAP)).collect();
    let rows: Vec<_> = cases
        .par_iter()
        .map(|(gamma, f)| -> Result<EllipticRow, String> {
            let q = elliptic_orbital_quadrature(gamma, f, cfg.quad_tol).map_err(|e| e.to_string())?;
            let c = elliptic_orbital_closed_form(gamma, f, cfg.quad_tol).map_err(|e| e.to_string())?;
            // Same box integral, other Jacobian.
            let ratio = gamma.jacobian() / gamma.duplicate_jacobian();
            Ok(EllipticRow {
                a: gamma.entries(),
                quadrature: q.value,
                quadrature_error: q.error_estimate,
                closed_form: c.value,
                relative_difference: (q.value - c.value).abs() / c.value.abs(),
                duplicate_factor: ratio.max(1.0 / ratio),
            })
        })
        .collect();
    let mut ok_rows = Vec::new();
    for row in rows {
        match row {
            Ok(x) => ok_rows.push(x),
            Err(e) => r.error(e),
        }
    }
    let worst = ok_rows.iter().map(|x| x.relative_difference).fold(0.0, f64::max);
    let dup = ok_rows.iter().map(|x| x.duplicate_factor).fold(0.0, f64::max);
    r.check(worst <= ELLIPTIC_REL_TOL, || format!("quadrature and closed form differ by {worst:e} relative"));
    r.check(dup >= DUPLICATE_MIN_FACTOR, || format!("duplicate reading misses by at most {dup}"));
    r.metric("pairs", ok_rows.len());
    r.metric("max_relative_difference", worst);
    r.metric("max_duplicate_factor", dup);
    r.metric("rows", ok_rows);
}

fn theta(r: &mut SuiteResult, cfg: &RunConfig) {
    let f = reference_theta_bump();
    let mut fits = BTreeMap::new();
    for (label, sign) in [("positive", 1.0), ("negative", -1.0)] {
        let lambdas = dyadic_sequence(cfg.theta_k_min, cfg.theta_k_max, sign);
        match singular_fit(&f, &lambdas, cfg.quad_tol) {
            Ok(fit) => {
                match fit.c_inv_relative_error {
                    Some(e) => r.check(e <= THETA_REL_TOL, || format!("{label}: c_inv off by {e:.4} relative")),
                    None => r.check(false, || format!("{label}: unipotent integral undefined")),
                }
                r.check(!fit.trend.growth_detected, || {
                    format!("{label}: residual grows along the sequence (p = {:.4})", fit.trend.p_value)
                });
                fits.insert(
                    label,
                    json!({
                        "c_inv": fit.c_inv,
                        "c_log": fit.c_log,
                        "c_0": fit.c_0,
                        "unipotent_integral": fit.unipotent_integral,
                        "c_inv_relative_error": fit.c_inv_relative_error,
                        "residual_max": fit.residual_max,
                        "trend": fit.trend,
                    }),
                );
            }
            Err(e) => r.error(format!("{label}: {e}")),
        }
    }
    r.metric("fits", fits);
}

fn transfer(r: &mut SuiteResult, cfg: &RunConfig, rng: &mut ChaCha8Rng) {
    let mu = reference_mu();
    let xi = Weight::zero();
    let result = (|| {
        let cal = calibrate(&mu, &xi, &calibration_grid())?;
        let grid = evaluation_grid(cfg.transfer_grid_n);
        let report = transfer_identity_check(&mu, &xi, &grid, &Conventions::FROZEN)?;
        let sens = sensitivity(&mu, &xi, &grid, &Conventions::FROZEN)?;
        Ok::<_, su21::endoscopy::EndoscopyError>((cal, report, sens))
    })();
    let (cal, report, sens) = match result {
        Ok(x) => x,
        Err(e) => return r.error(e),
    };
    r.check(cal.best == Conventions::FROZEN, || format!("calibration selected {:?}", cal.best));
    r.check(report.max_residual <= cfg.transfer_tol, || {
        format!("transfer residual {:e} exceeds {:e}", report.max_residual, cfg.transfer_tol)
    });
    r.check(sens.min_perturbed_residual > NON_VACUITY, || {
        format!("a perturbed convention leaves residual {:e}", sens.min_perturbed_residual)
    });
    let integral_xi = Weight::from_ints([1, 1, -2]).expect("sums to zero");
    let mut max_fiber_gap = 0.0f64;
    for _ in 0..cfg.fiber_points {
        let g = EllipticElement::from_pair(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        for x in [xi, integral_xi] {
            let fc = fiber_check(&g, &x);
            r.check(fc.invariant, || format!("pairing {} is not integral", fc.pairing));
            max_fiber_gap = max_fiber_gap.max((fc.first - fc.second).norm());
        }
    }
    r.check(max_fiber_gap <= 1e-12, || format!("chi differs across the cover by {max_fiber_gap:e}"));
    r.metric("conventions_manifest", Conventions::FROZEN);
    r.metric("calibration_best_residual", cal.best_residual);
    r.metric("max_residual", report.max_residual);
    r.metric("grid_points", cfg.transfer_grid_n);
    r.metric("min_perturbed_residual", sens.min_perturbed_residual);
    r.metric("max_fiber_gap", max_fiber_gap);
}

fn inversion(r: &mut SuiteResult, rng: &mut ChaCha8Rng) {
    let mut rows = BTreeMap::new();
    for (label, table) in [("two_element", PairingTable::two_element()), ("klein_four", PairingTable::klein_four())] {
        let traces: Vec<Rational64> = (0..table.size())
            .map(|_| Rational64::new(rng.random_range(-100..=100), rng.random_range(1..=12)))
            .collect();
        match pairing_inversion_check(&table, &traces) {
            Ok(rep) => {
                r.check(rep.orthogonal && rep.exact, || format!("{label}: traces not recovered exactly"));
                rows.insert(label, serde_json::to_value(&rep).expect("serializes"));
            }
            Err(e) => r.error(format!("{label}: {e}")),
        }
    }
    r.metric("tables", rows);
}

fn parameters(r: &mut SuiteResult, cfg: &RunConfig) {
    let entries = enumerate_parameters(cfg.enumeration_bound);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut disagreements = 0;
    let mut holomorphic_violations = 0;
    for e in &entries {
        *counts.entry(e.class.to_string()).or_default() += 1;
        if classify_parameter(&e.weight) != e.class {
            disagreements += 1;
        }
        if e.class == ParameterClass::Holomorphic && pair(&e.weight, Coroot::H23) >= Rational64::from(0) {
            holomorphic_violations += 1;
        }
    }
    r.check(disagreements == 0, || format!("{disagreements} entries disagree with classify_parameter"));
    r.check(holomorphic_violations == 0, || format!("{holomorphic_violations} holomorphic entries have lambda(H23) >= 0"));
    r.metric("bound", cfg.enumeration_bound);
    r.metric("entries", entries.len());
    r.metric("class_counts", counts);
    r.metric("multi_match", entries.iter().filter(|e| e.multi_match).count());
}
