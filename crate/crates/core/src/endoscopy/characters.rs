use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{sign_power, EllipticElement, EndoscopyError, HElement, Q_G, Q_H};
use crate::roots::{compact_weyl_group, coset_representatives, even_representative, positive_roots, rho, Coroot, Weight, WeylElement};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Delta_B(gamma) = gamma^rho prod_{alpha > 0} (1 - gamma^-alpha)`.
pub fn weyl_denominator(gamma: &EllipticElement) -> Result<Complex64, EndoscopyError> {
    gamma.require_regular()?;
    let mut d = gamma.monomial(&rho());
    for r in positive_roots() {
        d *= Complex64::new(1.0, 0.0) - gamma.monomial(&-r.weight);
    }
    Ok(d)
}

/// `(2i)^3 sin(a12/2) sin(a32/2) sin(a31/2)` evaluated at `gamma`. Equal to
/// `weyl_denominator` because `rho` is the half-sum of the positive roots.
pub fn weyl_denominator_sines(gamma: &EllipticElement) -> Complex64 {
    let th = gamma.angles();
    let s = ((th[0] - th[1]) / 2.0).sin() * ((th[2] - th[1]) / 2.0).sin() * ((th[2] - th[0]) / 2.0).sin();
    (2.0 * I).powi(3) * s
}

fn sign_of(r: num_rational::Rational64) -> f64 {
    if r.is_positive() {
        1.0
    } else {
        -1.0
    }
}

/// `prod_{alpha > 0} sign lambda(H_alpha)`.
pub fn chamber_sign(lambda: &Weight) -> f64 {
    positive_roots().iter().map(|r| sign_of(lambda.pair(r.coroot))).product()
}

/// Discrete-series character with Harish-Chandra parameter `lambda` on the
/// compact Cartan subgroup:
/// `(-1)^q(G) eps(lambda) sum_{v in W_K} sign(v) gamma^{v lambda} / Delta_B(gamma)`.
pub fn theta_g(lambda: &Weight, gamma: &EllipticElement) -> Result<Complex64, EndoscopyError> {
    if !lambda.is_regular() {
        return Err(EndoscopyError::IrregularParameter(*lambda));
    }
    let d = weyl_denominator(gamma)?;
    let num: Complex64 = compact_weyl_group()
        .iter()
        .map(|v| v.sign() as f64 * gamma.monomial(&v.act(lambda)))
        .sum();
    Ok(sign_power(Q_G) * chamber_sign(lambda) * num / d)
}

/// `Theta_{w mu}(gamma)`.
pub fn ds_character_g(mu: &Weight, w: &WeylElement, gamma: &EllipticElement) -> Result<Complex64, EndoscopyError> {
    theta_g(&w.act(mu), gamma)
}

/// `Delta_{B_H}(gamma_H) = 2i sin((th2 - th3)/2)`, from the single positive
/// root `alpha23` of `H`.
pub fn h_denominator(gamma_h: &HElement) -> Result<Complex64, EndoscopyError> {
    gamma_h.require_regular()?;
    let th = gamma_h.angles();
    Ok(2.0 * I * ((th[1] - th[2]) / 2.0).sin())
}

/// Overall sign of the `H`-side characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HSign {
    Standard,
    Flipped,
}

impl HSign {
    pub fn value(self) -> f64 {
        match self {
            HSign::Standard => 1.0,
            HSign::Flipped => -1.0,
        }
    }
}

/// Discrete-series character of `H` with parameter `nu` (in `H` labels):
/// the `U(1)` factor times the `SU(1,1)` character,
/// `(-1)^q(H) eps_H(nu) gamma_H^nu / Delta_{B_H}(gamma_H)`.
pub fn ds_character_h(nu: &Weight, gamma_h: &HElement, sign: HSign) -> Result<Complex64, EndoscopyError> {
    let a23 = nu.pair(Coroot::H23);
    if a23.is_zero() {
        return Err(EndoscopyError::IrregularParameter(*nu));
    }
    let d = h_denominator(gamma_h)?;
    Ok(sign_power(Q_H) * sign.value() * sign_of(a23) * gamma_h.monomial(nu) / d)
}

/// Sum over the two-member `H` packet `{nu, s23 nu}`.
pub fn stable_character_sum_h(nu: &Weight, gamma_h: &HElement, sign: HSign) -> Result<Complex64, EndoscopyError> {
    let s23 = WeylElement::S2;
    Ok(ds_character_h(nu, gamma_h, sign)? + ds_character_h(&s23.act(nu), gamma_h, sign)?)
}

/// Character of the coroot lattice with values in `{+1, -1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KappaCharacter {
    h12: i8,
    h23: i8,
    h13: i8,
}

impl KappaCharacter {
    pub fn new(h12: i8, h23: i8, h13: i8) -> Result<Self, EndoscopyError> {
        if [h12, h23, h13].iter().any(|v| v.abs() != 1) {
            return Err(EndoscopyError::Kappa("values must be +1 or -1".into()));
        }
        if h13 != h12 * h23 {
            return Err(EndoscopyError::Kappa(format!(
                "kappa(H13) = {h13} but kappa(H12) kappa(H23) = {}",
                h12 * h23
            )));
        }
        Ok(KappaCharacter { h12, h23, h13 })
    }

    pub fn trivial() -> Self {
        KappaCharacter { h12: 1, h23: 1, h13: 1 }
    }

    /// The nontrivial character with `kappa(H13) = 1`.
    pub fn reference() -> Self {
        KappaCharacter { h12: -1, h23: -1, h13: 1 }
    }

    pub fn value(&self, h: Coroot) -> i8 {
        match (h.k.min(h.l), h.k.max(h.l)) {
            (0, 1) => self.h12,
            (1, 2) => self.h23,
            _ => self.h13,
        }
    }

    /// `kappa(w)` for even `w`, read through `ident`; `None` for odd `w`.
    pub fn on_even(&self, w: &WeylElement, ident: KappaIdentification) -> Option<i8> {
        ident.coroot(w).map(|h| h.map_or(1, |h| self.value(h)))
    }

    /// Values on `e, c, c^2`.
    pub fn even_values(&self, ident: KappaIdentification) -> [i8; 3] {
        WeylElement::even().map(|w| self.on_even(&w, ident).expect("even"))
    }
}

/// How the even Weyl elements `c = s1 s2` and `c^2` are matched with the
/// coroots on which `kappa` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaIdentification {
    /// `c -> H12`, `c^2 -> H23`.
    CycleToH12,
    /// `c -> H13`, `c^2 -> H12`.
    CycleToH13,
}

impl KappaIdentification {
    /// `Some(None)` for the identity, `Some(Some(h))` for `c` and `c^2`.
    pub fn coroot(self, w: &WeylElement) -> Option<Option<Coroot>> {
        if *w == WeylElement::IDENTITY {
            return Some(None);
        }
        let (c, c2) = match self {
            KappaIdentification::CycleToH12 => (Coroot::H12, Coroot::H23),
            KappaIdentification::CycleToH13 => (Coroot::H13, Coroot::H12),
        };
        if *w == WeylElement::C {
            Some(Some(c))
        } else if *w == WeylElement::C2 {
            Some(Some(c2))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketMember {
    /// Minimal-length representative of the coset `W_K w`.
    pub representative: WeylElement,
    /// The even element of the same coset.
    pub even: WeylElement,
    pub parameter: Weight,
}

/// The three discrete series with parameters `w mu`, `w` running over
/// `W_K \ W`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LPacket {
    pub mu: Weight,
    pub members: [PacketMember; 3],
}

impl LPacket {
    pub fn new(mu: Weight) -> Result<Self, EndoscopyError> {
        if !mu.is_regular() {
            return Err(EndoscopyError::IrregularParameter(mu));
        }
        let members = coset_representatives().map(|r| PacketMember {
            representative: r,
            even: even_representative(&r),
            parameter: r.act(&mu),
        });
        Ok(LPacket { mu, members })
    }

    /// `Theta_{r mu}(gamma^-1)` for each member.
    pub fn characters_at_inverse(&self, gamma: &EllipticElement) -> Result<[Complex64; 3], EndoscopyError> {
        let inv = gamma.inverse();
        let mut out = [Complex64::zero(); 3];
        for (slot, m) in out.iter_mut().zip(&self.members) {
            *slot = theta_g(&m.parameter, &inv)?;
        }
        Ok(out)
    }
}

/// `sum_{sign(w) = 1} kappa(w) Theta_{w mu}(gamma^-1)`.
pub fn kappa_orbital_sum(
    mu: &Weight,
    kappa: &KappaCharacter,
    ident: KappaIdentification,
    gamma: &EllipticElement,
) -> Result<Complex64, EndoscopyError> {
    let inv = gamma.inverse();
    let mut total = Complex64::zero();
    for w in WeylElement::even() {
        let k = kappa.on_even(&w, ident).expect("even") as f64;
        total += k * ds_character_g(mu, &w, &inv)?;
    }
    Ok(total)
}

/// Sum of `Theta(gamma^-1)` over the L-packet of `mu`.
pub fn stable_character_sum(mu: &Weight, gamma: &EllipticElement) -> Result<Complex64, EndoscopyError> {
    Ok(LPacket::new(*mu)?.characters_at_inverse(gamma)?.iter().sum())
}
