//! Roots of su(2,1) relative to the compact Cartan, Weyl groups and the
//! Harish-Chandra parameter classes.

use std::fmt;
use std::io::Write;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("weight coordinates sum to {0}, not 0")]
    NonzeroSum(Rational64),
    #[error("cannot parse weight from {0:?}")]
    Parse(String),
}

/// Functional `diag(i h1, i h2, i h3) -> l1 h1 + l2 h2 + l3 h3` with
/// `l1 + l2 + l3 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight([Rational64; 3]);

impl Weight {
    pub fn new(c: [Rational64; 3]) -> Result<Self, WeightError> {
        let s = c[0] + c[1] + c[2];
        if s.is_zero() {
            Ok(Weight(c))
        } else {
            Err(WeightError::NonzeroSum(s))
        }
    }

    pub fn from_ints(c: [i64; 3]) -> Result<Self, WeightError> {
        Self::new(c.map(Rational64::from_integer))
    }

    pub fn zero() -> Self {
        Weight([Rational64::zero(); 3])
    }

    pub fn coords(&self) -> [Rational64; 3] {
        self.0
    }

    pub fn coord(&self, k: usize) -> Rational64 {
        self.0[k]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        self.0.map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    /// `e_k - e_l` (0-based).
    pub fn root(k: usize, l: usize) -> Self {
        let mut c = [Rational64::zero(); 3];
        c[k] += 1;
        c[l] -= 1;
        Weight(c)
    }

    pub fn pair(&self, h: Coroot) -> Rational64 {
        pair(self, h)
    }

    /// No root pairs to zero with it.
    pub fn is_regular(&self) -> bool {
        Coroot::ALL.iter().all(|&h| !self.pair(h).is_zero())
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        Weight(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.map(|x| -x))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

impl std::str::FromStr for Weight {
    type Err = WeightError;

    /// `l1,l2,l3` with integer or `p/q` entries.
    fn from_str(s: &str) -> Result<Self, WeightError> {
        let err = || WeightError::Parse(s.to_string());
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err());
        }
        let mut c = [Rational64::zero(); 3];
        for (slot, p) in c.iter_mut().zip(&parts) {
            *slot = p.parse::<Rational64>().map_err(|_| err())?;
        }
        Weight::new(c)
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `rho = (0, -1, 1)`, the half-sum of the positive roots.
pub fn rho() -> Weight {
    Weight::root(2, 1)
}

/// `H_kl = E_kk - E_ll` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coroot {
    pub k: usize,
    pub l: usize,
}

impl Coroot {
    pub const H12: Coroot = Coroot { k: 0, l: 1 };
    pub const H21: Coroot = Coroot { k: 1, l: 0 };
    pub const H13: Coroot = Coroot { k: 0, l: 2 };
    pub const H31: Coroot = Coroot { k: 2, l: 0 };
    pub const H23: Coroot = Coroot { k: 1, l: 2 };
    pub const H32: Coroot = Coroot { k: 2, l: 1 };
    pub const ALL: [Coroot; 6] = [
        Coroot::H12,
        Coroot::H21,
        Coroot::H13,
        Coroot::H31,
        Coroot::H23,
        Coroot::H32,
    ];

    pub fn diagonal(&self) -> [i64; 3] {
        let mut d = [0; 3];
        d[self.k] += 1;
        d[self.l] -= 1;
        d
    }

    pub fn label(&self) -> String {
        format!("H{}{}", self.k + 1, self.l + 1)
    }
}

/// `lambda(H_kl) = lambda_k - lambda_l`.
pub fn pair(lambda: &Weight, h: Coroot) -> Rational64 {
    lambda.coord(h.k) - lambda.coord(h.l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    Compact,
    Noncompact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Root {
    pub weight: Weight,
    pub kind: RootKind,
    pub coroot: Coroot,
    pub positive: bool,
}

impl Root {
    fn new(k: usize, l: usize) -> Root {
        let kind = if (k, l) == (0, 1) || (k, l) == (1, 0) {
            RootKind::Compact
        } else {
            RootKind::Noncompact
        };
        Root {
            weight: Weight::root(k, l),
            kind,
            coroot: Coroot { k, l },
            positive: POSITIVE.contains(&(k, l)),
        }
    }
}

/// Positive system `{alpha12, alpha32, alpha31}`.
const POSITIVE: [(usize, usize); 3] = [(0, 1), (2, 1), (2, 0)];

pub fn root_system() -> Vec<Root> {
    Coroot::ALL.iter().map(|h| Root::new(h.k, h.l)).collect()
}

pub fn positive_roots() -> Vec<Root> {
    POSITIVE.iter().map(|&(k, l)| Root::new(k, l)).collect()
}

/// Half-sum of the positive roots, computed.
pub fn half_sum_positive() -> Weight {
    let s = positive_roots()
        .into_iter()
        .fold(Weight::zero(), |acc, r| acc + r.weight);
    Weight(s.0.map(|x| x / 2))
}

/// Element of S3 acting on coordinates: `(w lambda)_{w(k)} = lambda_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    perm: [usize; 3],
}

impl WeylElement {
    pub fn new(perm: [usize; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return None;
            }
            seen[p] = true;
        }
        Some(WeylElement { perm })
    }

    pub const IDENTITY: WeylElement = WeylElement { perm: [0, 1, 2] };
    /// Reflection in `alpha12` (the compact root).
    pub const S1: WeylElement = WeylElement { perm: [1, 0, 2] };
    /// Reflection in `alpha23`.
    pub const S2: WeylElement = WeylElement { perm: [0, 2, 1] };
    /// `c = s1 s2`: 1 -> 2 -> 3 -> 1.
    pub const C: WeylElement = WeylElement { perm: [1, 2, 0] };
    /// `c^2 = s2 s1`.
    pub const C2: WeylElement = WeylElement { perm: [2, 0, 1] };

    pub fn all() -> [WeylElement; 6] {
        [
            WeylElement::IDENTITY,
            WeylElement::S1,
            WeylElement::S2,
            WeylElement { perm: [2, 1, 0] },
            WeylElement::C,
            WeylElement::C2,
        ]
    }

    /// Even elements `e, c, c^2`.
    pub fn even() -> [WeylElement; 3] {
        [WeylElement::IDENTITY, WeylElement::C, WeylElement::C2]
    }

    pub fn perm(&self) -> [usize; 3] {
        self.perm
    }

    /// Image of index `k`.
    pub fn apply_index(&self, k: usize) -> usize {
        self.perm[k]
    }

    /// `(self * other)(k) = self(other(k))`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            perm: std::array::from_fn(|k| self.perm[other.perm[k]]),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut inv = [0; 3];
        for (k, &p) in self.perm.iter().enumerate() {
            inv[p] = k;
        }
        WeylElement { perm: inv }
    }

    pub fn length(&self) -> usize {
        let p = self.perm;
        (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count()
    }

    pub fn sign(&self) -> i64 {
        if self.length() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn act(&self, lambda: &Weight) -> Weight {
        let mut c = [Rational64::zero(); 3];
        for k in 0..3 {
            c[self.perm[k]] = lambda.coord(k);
        }
        Weight(c)
    }

    pub fn act_coroot(&self, h: Coroot) -> Coroot {
        Coroot {
            k: self.perm[h.k],
            l: self.perm[h.l],
        }
    }

    /// Angles permuted like weights, so that `(w gamma)^(w lambda) = gamma^lambda`.
    pub fn act_angles(&self, theta: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[self.perm[k]] = theta[k];
        }
        out
    }

    pub fn permutation_matrix_det(&self) -> i64 {
        let mut m = [[0i64; 3]; 3];
        for k in 0..3 {
            m[self.perm[k]][k] = 1;
        }
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn label(&self) -> String {
        format!("[{},{},{}]", self.perm[0] + 1, self.perm[1] + 1, self.perm[2] + 1)
    }
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

pub fn weyl_act(w: &WeylElement, lambda: &Weight) -> Weight {
    w.act(lambda)
}

/// The compact Weyl group `W_K = {e, s1}`.
pub fn compact_weyl_group() -> [WeylElement; 2] {
    [WeylElement::IDENTITY, WeylElement::S1]
}

/// Minimal-length representatives of the right cosets `W_K w`.
pub fn coset_representatives() -> [WeylElement; 3] {
    let mut reps: Vec<WeylElement> = Vec::new();
    let mut all = WeylElement::all().to_vec();
    all.sort_by_key(|w| (w.length(), w.perm));
    for w in all {
        let covered = reps
            .iter()
            .any(|r| compact_weyl_group().iter().any(|v| v.compose(r) == w));
        if !covered {
            reps.push(w);
        }
    }
    [reps[0], reps[1], reps[2]]
}

/// The even element in the coset `W_K w`.
pub fn even_representative(w: &WeylElement) -> WeylElement {
    compact_weyl_group()
        .iter()
        .map(|v| v.compose(w))
        .find(|x| x.sign() == 1)
        .expect("each coset of W_K contains one even element")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParameterClass {
    Holomorphic,
    AntiHolomorphic,
    NeitherNor,
    NotRegular,
    NotInF0,
}

impl fmt::Display for ParameterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParameterClass::Holomorphic => "holomorphic",
            ParameterClass::AntiHolomorphic => "anti_holomorphic",
            ParameterClass::NeitherNor => "neither_nor",
            ParameterClass::NotRegular => "not_regular",
            ParameterClass::NotInF0 => "not_in_f0",
        };
        f.write_str(s)
    }
}

fn positive_integer(r: Rational64) -> bool {
    r.is_integer() && r.is_positive()
}

/// Branch matches in printed order: holomorphic, anti-holomorphic,
/// neither-nor.
fn branch_matches(lambda: &Weight) -> [bool; 3] {
    let p = |h| pair(lambda, h);
    let h12 = positive_integer(p(Coroot::H12));
    [
        h12 && positive_integer(p(Coroot::H31)),
        h12 && positive_integer(p(Coroot::H23)),
        h12 && positive_integer(p(Coroot::H13)) && p(Coroot::H12) > p(Coroot::H13),
    ]
}

pub fn classify_parameter(lambda: &Weight) -> ParameterClass {
    if !lambda.is_regular() {
        return ParameterClass::NotRegular;
    }
    match branch_matches(lambda) {
        [true, _, _] => ParameterClass::Holomorphic,
        [_, true, _] => ParameterClass::AntiHolomorphic,
        [_, _, true] => ParameterClass::NeitherNor,
        _ => ParameterClass::NotInF0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationEntry {
    pub weight: Weight,
    pub class: ParameterClass,
    /// More than one trichotomy branch matched.
    pub multi_match: bool,
}

/// Regular weights with integral pairings bounded by `bound` in modulus.
pub fn enumerate_parameters(bound: u32) -> Vec<EnumerationEntry> {
    let b = i64::from(bound);
    let mut out = Vec::new();
    for a in -b..=b {
        for c in -b..=b {
            if a == 0 || c == 0 || a + c == 0 || (a + c).abs() > b {
                continue;
            }
            // a = l1 - l2, c = l2 - l3
            let w = Weight::new([
                Rational64::new(2 * a + c, 3),
                Rational64::new(c - a, 3),
                Rational64::new(-a - 2 * c, 3),
            ])
            .expect("coordinates sum to zero");
            let matches = branch_matches(&w).iter().filter(|&&m| m).count();
            out.push(EnumerationEntry {
                weight: w,
                class: classify_parameter(&w),
                multi_match: matches > 1,
            });
        }
    }
    out
}

/// CSV with columns `l1,l2,l3,H12,H21,H13,H31,H23,H32,class,multi_match`.
pub fn write_enumeration_csv<W: Write>(entries: &[EnumerationEntry], out: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["l1".to_string(), "l2".into(), "l3".into()];
    header.extend(Coroot::ALL.iter().map(Coroot::label));
    header.extend(["class".to_string(), "multi_match".into()]);
    wtr.write_record(&header)?;
    for e in entries {
        let mut row: Vec<String> = e.weight.coords().iter().map(ToString::to_string).collect();
        row.extend(Coroot::ALL.iter().map(|&h| pair(&e.weight, h).to_string()));
        row.push(e.class.to_string());
        row.push(e.multi_match.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
