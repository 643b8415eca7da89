//! The Lie algebra su(2,1): printed generators, the corrected basis,
//! bracket, Cartan involution and the basis audit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{decompose, ComplexMatrix3, Mat3, QMat};
use crate::scalar::{GaussRat, Mode, Scalar};

/// Relative tolerance for float-mode structural checks.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("operands have different arithmetic modes ({0:?} vs {1:?})")]
    ModeMismatch(Mode, Mode),
    #[error("matrix is not traceless")]
    NotTraceless,
    #[error("group matrix is singular")]
    Singular,
    #[error("matrix is not in SU(2,1) within tolerance")]
    NotMember,
    #[error("operation requires float mode")]
    NotFloat,
}

/// The form `I_{2,1} = diag(1, 1, -1)`.
pub fn i21<S: Scalar>() -> Mat3<S> {
    Mat3::diag([S::one(), S::one(), -S::one()])
}

/// Generators as printed: `T, H, X, Y, Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    T,
    H,
    X,
    Y,
    Z,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::T,
        Generator::H,
        Generator::X,
        Generator::Y,
        Generator::Z,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::T => "T",
            Generator::H => "H",
            Generator::X => "X",
            Generator::Y => "Y",
            Generator::Z => "Z",
        }
    }

    pub fn printed<S: Scalar>(self) -> Mat3<S> {
        match self {
            Generator::T => Mat3::diag([
                S::from_ratio(1, 3),
                S::from_ratio(-2, 3),
                S::from_ratio(1, 3),
            ]),
            Generator::H => Mat3::from_ints([[0, 0, 1], [0, 0, 0], [1, 0, 0]]),
            Generator::X => Mat3::from_ints([[0, -1, 0], [1, 0, -1], [0, -1, 0]]),
            Generator::Y => Mat3::from_ints([[0, -1, 0], [-1, 0, 1], [0, -1, 0]]),
            Generator::Z => Mat3::from_ints([[2, 0, -2], [0, 0, 0], [2, 0, -2]]),
        }
    }

    /// Whether the corrected basis uses `i` times the printed matrix.
    pub fn needs_twist(self) -> bool {
        matches!(self, Generator::T | Generator::Y | Generator::Z)
    }

    pub fn corrected_name(self) -> &'static str {
        match self {
            Generator::T => "T'",
            Generator::H => "H",
            Generator::X => "X",
            Generator::Y => "Y'",
            Generator::Z => "Z'",
        }
    }

    /// Member of the corrected basis `{T', H, X, Y', Z'}`.
    pub fn corrected<S: Scalar>(self) -> Mat3<S> {
        let m = self.printed::<S>();
        if self.needs_twist() {
            m.scale(&S::i())
        } else {
            m
        }
    }
}

/// Which reading of the generators to use: as printed, or i-twisted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    #[default]
    Corrected,
    Printed,
}

impl BasisChoice {
    pub fn matrix<S: Scalar>(self, g: Generator) -> Mat3<S> {
        match self {
            BasisChoice::Corrected => g.corrected(),
            BasisChoice::Printed => g.printed(),
        }
    }
}

/// su(2,1) membership: `I21 * m` skew-Hermitian and `tr m = 0`.
pub fn is_algebra_member<S: Scalar>(m: &Mat3<S>, tol: f64) -> bool {
    let j = i21::<S>() * m.clone();
    let skew = j.clone() + j.adjoint();
    let scale = m.max_abs().max(1.0);
    skew.is_zero_within(tol * scale) && m.trace().is_zero_within(tol * scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub matrix: ComplexMatrix3,
    pub label: Option<String>,
}

impl AlgebraElement {
    pub fn new(matrix: ComplexMatrix3, label: Option<String>) -> Result<Self, AlgebraError> {
        let traceless = match &matrix {
            ComplexMatrix3::Exact(m) => m.trace().is_zero_within(0.0),
            ComplexMatrix3::Float(m) => m.trace().norm() <= FLOAT_TOL * m.max_abs().max(1.0),
        };
        if !traceless {
            return Err(AlgebraError::NotTraceless);
        }
        Ok(AlgebraElement { matrix, label })
    }

    pub fn exact(m: QMat, label: &str) -> Self {
        Self::new(ComplexMatrix3::Exact(m), Some(label.to_string()))
            .expect("generator matrices are traceless")
    }

    pub fn printed_exact(g: Generator) -> Self {
        Self::exact(g.printed(), g.name())
    }

    pub fn corrected_exact(g: Generator) -> Self {
        Self::exact(g.corrected(), g.corrected_name())
    }

    pub fn mode(&self) -> Mode {
        self.matrix.mode()
    }
}

/// `[a, b] = ab - ba`.
pub fn bracket(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    let matrix = match (&a.matrix, &b.matrix) {
        (ComplexMatrix3::Exact(x), ComplexMatrix3::Exact(y)) => {
            ComplexMatrix3::Exact(x.commutator(y))
        }
        (ComplexMatrix3::Float(x), ComplexMatrix3::Float(y)) => {
            ComplexMatrix3::Float(x.commutator(y))
        }
        _ => return Err(AlgebraError::ModeMismatch(a.mode(), b.mode())),
    };
    let label = match (&a.label, &b.label) {
        (Some(x), Some(y)) => Some(format!("[{x},{y}]")),
        _ => None,
    };
    Ok(AlgebraElement { matrix, label })
}

/// `theta(X) = -X^dagger` on the algebra.
pub fn cartan_involution_algebra(x: &AlgebraElement) -> AlgebraElement {
    let matrix = match &x.matrix {
        ComplexMatrix3::Exact(m) => ComplexMatrix3::Exact(-m.adjoint()),
        ComplexMatrix3::Float(m) => ComplexMatrix3::Float(-m.adjoint()),
    };
    AlgebraElement {
        matrix,
        label: x.label.as_ref().map(|l| format!("theta({l})")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRow {
    pub with: String,
    /// `[g', h']` written in the corrected basis, e.g. `-Z'` or `0`.
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub name: String,
    pub member: bool,
    pub i_twist_member: bool,
    pub corrected_name: String,
    pub bracket_rows: Vec<BracketRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub holds: bool,
    /// Max entry of `lhs - rhs`; exactly 0 when an exact identity holds.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mode: Mode,
    pub generators: Vec<GeneratorRecord>,
    pub printed_identities: Vec<IdentityCheck>,
    pub corrected_identities: Vec<IdentityCheck>,
}

impl AuditReport {
    pub fn printed_hold(&self) -> bool {
        self.printed_identities.iter().all(|c| c.holds)
    }

    pub fn corrected_hold(&self) -> bool {
        self.corrected_identities.iter().all(|c| c.holds)
    }

    pub fn generator(&self, name: &str) -> Option<&GeneratorRecord> {
        self.generators.iter().find(|g| g.name == name)
    }

    /// Verdict tuple used to compare exact and float audits.
    pub fn verdicts(&self) -> Vec<(String, bool, bool)> {
        let mut v: Vec<_> = self
            .generators
            .iter()
            .map(|g| (g.name.clone(), g.member, g.i_twist_member))
            .collect();
        v.extend(
            self.printed_identities
                .iter()
                .chain(&self.corrected_identities)
                .map(|c| (c.identity.clone(), c.holds, true)),
        );
        v
    }
}

/// A signed bracket identity `[a, b] = sign * c` (or `= 0` when `c` is None).
struct Relation {
    a: Generator,
    b: Generator,
    rhs: Option<(i64, Generator)>,
}

const RELATIONS: [Relation; 6] = [
    Relation { a: Generator::X, b: Generator::Y, rhs: Some((1, Generator::Z)) },
    Relation { a: Generator::X, b: Generator::Z, rhs: None },
    Relation { a: Generator::Y, b: Generator::Z, rhs: None },
    Relation { a: Generator::T, b: Generator::X, rhs: Some((1, Generator::Y)) },
    Relation { a: Generator::T, b: Generator::Y, rhs: Some((-1, Generator::X)) },
    Relation { a: Generator::T, b: Generator::Z, rhs: None },
];

fn check_relations<S: Scalar>(choice: BasisChoice, tol: f64) -> Vec<IdentityCheck> {
    let name = |g: Generator| match choice {
        BasisChoice::Printed => g.name(),
        BasisChoice::Corrected => g.corrected_name(),
    };
    RELATIONS
        .iter()
        .map(|r| {
            let lhs = choice.matrix::<S>(r.a).commutator(&choice.matrix::<S>(r.b));
            let (rhs, rhs_text) = match r.rhs {
                None => (Mat3::<S>::zero(), "0".to_string()),
                Some((s, g)) => (
                    choice.matrix::<S>(g).scale(&S::from_i64(s)),
                    format!("{}{}", if s < 0 { "-" } else { "" }, name(g)),
                ),
            };
            let diff = lhs - rhs;
            IdentityCheck {
                identity: format!("[{},{}] = {}", name(r.a), name(r.b), rhs_text),
                holds: diff.is_zero_within(tol),
                residual: diff.max_abs(),
            }
        })
        .collect()
}

fn format_combination<S: Scalar>(coeffs: &[S]) -> String {
    let mut out = String::new();
    for (c, g) in coeffs.iter().zip(Generator::ALL) {
        if c.is_zero_within(FLOAT_TOL) {
            continue;
        }
        let n = g.corrected_name();
        let term = match c.render().as_str() {
            "1" => n.to_string(),
            "-1" => format!("-{n}"),
            t if t.contains(['+', 'i']) => format!("({t}){n}"),
            t => format!("{t}{n}"),
        };
        if !out.is_empty() && !term.starts_with('-') {
            out.push('+');
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn audit_generic<S: Scalar>(tol: f64) -> AuditReport {
    let corrected: Vec<Mat3<S>> = Generator::ALL.iter().map(|g| g.corrected()).collect();
    let generators = Generator::ALL
        .iter()
        .map(|&g| {
            let printed = g.printed::<S>();
            let twisted = printed.scale(&S::i());
            let cg = g.corrected::<S>();
            let bracket_rows = Generator::ALL
                .iter()
                .map(|&h| {
                    let br = cg.commutator(&h.corrected::<S>());
                    let result = decompose(&br, &corrected, tol)
                        .map(|c| format_combination(&c))
                        .unwrap_or_else(|| "outside span".into());
                    BracketRow {
                        with: h.corrected_name().into(),
                        result,
                    }
                })
                .collect();
            GeneratorRecord {
                name: g.name().into(),
                member: is_algebra_member(&printed, tol),
                i_twist_member: is_algebra_member(&twisted, tol),
                corrected_name: g.corrected_name().into(),
                bracket_rows,
            }
        })
        .collect();
    AuditReport {
        mode: S::MODE,
        generators,
        printed_identities: check_relations::<S>(BasisChoice::Printed, tol),
        corrected_identities: check_relations::<S>(BasisChoice::Corrected, tol),
    }
}

/// Audit in Gaussian-rational arithmetic (zero tolerance).
pub fn audit_basis_exact() -> AuditReport {
    audit_generic::<GaussRat>(0.0)
}

/// Audit in double precision.
pub fn audit_basis_float() -> AuditReport {
    audit_generic::<Complex64>(FLOAT_TOL)
}

pub fn audit_basis(mode: Mode) -> AuditReport {
    match mode {
        Mode::Exact => audit_basis_exact(),
        Mode::Float => audit_basis_float(),
    }
}

/// Exact check that theta is an involution on each printed and corrected
/// generator.
pub fn theta_involution_exact() -> bool {
    Generator::ALL.iter().all(|&g| {
        [AlgebraElement::printed_exact(g), AlgebraElement::corrected_exact(g)]
            .iter()
            .all(|x| cartan_involution_algebra(&cartan_involution_algebra(x)).matrix == x.matrix)
    })
}
