use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use super::{
    kappa_orbital_sum, stable_character_sum, EllipticElement, EndoscopyError, KappaCharacter, KappaIdentification,
    LPacket,
};
use crate::roots::{Weight, WeylElement};
use crate::scalar::ser_rationals;

/// Formal combination `f^H = sum_nu a(w, nu) g_nu` over even `w` and
/// `nu = w' mu`, stored as its coefficient matrix `a[w][w']`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoCoefficientCombination {
    pub mu: Weight,
    pub coefficients: [[f64; 3]; 3],
}

impl PseudoCoefficientCombination {
    /// Rows and columns follow `WeylElement::even()`.
    pub fn new(mu: Weight, coefficients: Vec<Vec<f64>>) -> Result<Self, EndoscopyError> {
        if coefficients.len() != 3 || coefficients.iter().any(|r| r.len() != 3) {
            return Err(EndoscopyError::IndexMismatch(format!(
                "expected a 3 x 3 table over the even Weyl elements, got {} rows",
                coefficients.len()
            )));
        }
        let mut a = [[0.0; 3]; 3];
        for (i, row) in coefficients.iter().enumerate() {
            a[i].copy_from_slice(row);
        }
        Ok(PseudoCoefficientCombination { mu, coefficients: a })
    }

    pub fn zero(mu: Weight) -> Self {
        PseudoCoefficientCombination { mu, coefficients: [[0.0; 3]; 3] }
    }

    /// `a(w1, w2 mu) = kappa(w2) kappa(w2 w1)^-1`.
    pub fn from_kappa(mu: Weight, kappa: &KappaCharacter, ident: KappaIdentification) -> Self {
        let even = WeylElement::even();
        let k = |w: &WeylElement| kappa.on_even(w, ident).expect("even") as f64;
        let mut a = [[0.0; 3]; 3];
        for (i, w1) in even.iter().enumerate() {
            for (j, w2) in even.iter().enumerate() {
                a[i][j] = k(w2) / k(&w2.compose(w1));
            }
        }
        PseudoCoefficientCombination { mu, coefficients: a }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().flatten().all(|c| *c == 0.0)
    }

    /// `trace Sigma_nu(f^H) = sum_w a(w, nu) trace pi_{w mu}(f)` for each
    /// `nu`, given the traces indexed by even `w`.
    pub fn dual_traces(&self, traces: &[Complex64; 3]) -> [Complex64; 3] {
        std::array::from_fn(|j| (0..3).map(|i| self.coefficients[i][j] * traces[i]).sum())
    }
}

/// Rows indexed by `s in S_phi`, columns by `pi in Pi(phi)`, entries
/// `<s, pi> = +-1`. Row 0 is the basepoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingTable {
    rows: Vec<Vec<i64>>,
}

impl PairingTable {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, EndoscopyError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(EndoscopyError::IndexMismatch("pairing table must be square and nonempty".into()));
        }
        if rows.iter().flatten().any(|v| v.abs() != 1) {
            return Err(EndoscopyError::IndexMismatch("entries must be +1 or -1".into()));
        }
        if rows[0].iter().any(|v| *v != 1) {
            return Err(EndoscopyError::IndexMismatch("basepoint row must be all +1".into()));
        }
        let t = PairingTable { rows };
        if !t.is_orthogonal() {
            return Err(EndoscopyError::NonOrthogonalTable);
        }
        Ok(t)
    }

    /// `S_phi = Z/2`, `Pi = {pi+, pi-}`.
    pub fn two_element() -> Self {
        PairingTable { rows: vec![vec![1, 1], vec![1, -1]] }
    }

    /// Character table of `(Z/2)^2`.
    pub fn klein_four() -> Self {
        PairingTable {
            rows: vec![vec![1, 1, 1, 1], vec![1, -1, 1, -1], vec![1, 1, -1, -1], vec![1, -1, -1, 1]],
        }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// `(1/#S) T T^t` as exact rationals.
    pub fn normalized_gram(&self) -> Vec<Vec<Rational64>> {
        let n = self.size() as i64;
        self.rows
            .iter()
            .map(|a| {
                self.rows
                    .iter()
                    .map(|b| Rational64::new(a.iter().zip(b).map(|(x, y)| x * y).sum(), n))
                    .collect()
            })
            .collect()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.normalized_gram().iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, v)| *v == if i == j { Rational64::from(1) } else { Rational64::zero() })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionReport {
    #[serde(serialize_with = "ser_rationals")]
    pub traces: Vec<Rational64>,
    /// `Sigma_s = sum_pi <s, pi> trace pi(f)`.
    #[serde(serialize_with = "ser_rationals")]
    pub sigma: Vec<Rational64>,
    /// `(1/#S) sum_s <s, pi> Sigma_s`.
    #[serde(serialize_with = "ser_rationals")]
    pub recovered: Vec<Rational64>,
    pub orthogonal: bool,
    pub exact: bool,
}

pub fn pairing_inversion_check(table: &PairingTable, traces: &[Rational64]) -> Result<InversionReport, EndoscopyError> {
    let n = table.size();
    if traces.len() != n {
        return Err(EndoscopyError::IndexMismatch(format!("{} traces for a table of size {n}", traces.len())));
    }
    if !table.is_orthogonal() {
        return Err(EndoscopyError::NonOrthogonalTable);
    }
    let rows = table.rows();
    let sigma: Vec<Rational64> = rows
        .iter()
        .map(|r| r.iter().zip(traces).map(|(p, t)| Rational64::from(*p) * t).sum())
        .collect();
    let recovered: Vec<Rational64> = (0..n)
        .map(|pi| {
            let s: Rational64 = rows.iter().zip(&sigma).map(|(r, sg)| Rational64::from(r[pi]) * sg).sum();
            s / Rational64::from(n as i64)
        })
        .collect();
    let exact = recovered.as_slice() == traces;
    Ok(InversionReport { traces: traces.to_vec(), sigma, recovered, orthogonal: true, exact })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyRow {
    pub angles: [f64; 3],
    /// `sum_pi kappa(pi) Theta_pi(gamma^-1)` per packet, from packet members.
    pub per_packet: Vec<Complex64>,
    pub total: Complex64,
    /// The same total from `kappa_orbital_sum`.
    pub cross_check: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyReport {
    pub kappa: KappaCharacter,
    pub packets: Vec<Weight>,
    pub rows: Vec<AssemblyRow>,
    pub max_residual: f64,
}

/// Tabulates `sum_pi kappa(pi) Theta_pi` over the packets on `grid`, reading
/// `kappa(pi)` on the even element of each member's coset, and compares
/// with the per-packet kappa sums.
pub fn stable_trace_assembly(
    packets: &[LPacket],
    kappa: &KappaCharacter,
    ident: KappaIdentification,
    grid: &[EllipticElement],
) -> Result<AssemblyReport, EndoscopyError> {
    let mut rows = Vec::with_capacity(grid.len());
    for gamma in grid {
        let mut per_packet = Vec::with_capacity(packets.len());
        let mut cross = Complex64::zero();
        for p in packets {
            let values = p.characters_at_inverse(gamma)?;
            let s: Complex64 = p
                .members
                .iter()
                .zip(values)
                .map(|(m, v)| kappa.on_even(&m.even, ident).expect("even") as f64 * v)
                .sum();
            per_packet.push(s);
            cross += kappa_orbital_sum(&p.mu, kappa, ident, gamma)?;
        }
        let total: Complex64 = per_packet.iter().sum();
        rows.push(AssemblyRow { angles: gamma.angles(), residual: (total - cross).norm(), per_packet, total, cross_check: cross });
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(AssemblyReport { kappa: *kappa, packets: packets.iter().map(|p| p.mu).collect(), rows, max_residual })
}

/// Stable sums of each packet, for comparison with a trivial-kappa assembly.
pub fn packet_stable_sums(packets: &[LPacket], gamma: &EllipticElement) -> Result<Vec<Complex64>, EndoscopyError> {
    packets.iter().map(|p| stable_character_sum(&p.mu, gamma)).collect()
}
