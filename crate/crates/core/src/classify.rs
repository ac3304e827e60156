//! The fifteen `PGL(3,q)`-classes of lines of `PG(5,q)`: canonical
//! representatives, the invariant-based decision procedure, and the expected
//! stabiliser orders and class sizes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::forms::TernaryForm;
use crate::gf::{FieldElem, FieldError, FieldSpec};
use crate::pencil::{invariant_profile_with, InvariantProfile, Pencil, PencilError, RankDist};
use crate::symspace::{DirectPoints, PointClass, PointInfo, Rank2Kind, SymMat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("label {label} does not exist for q = {q}")]
    InvalidLabelForField { label: ClassLabel, q: u32 },
    #[error("no parameters found for {label} at q = {q}")]
    NoParams { label: ClassLabel, q: u32 },
    #[error("profile does not match any class: {0}")]
    UnclassifiableProfile(String),
    #[error("cannot parse class label {0:?}")]
    BadLabel(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

/// Tensor orbits whose lines have symmetric representatives.
pub const TENSOR_ORBITS: [u8; 11] = [5, 6, 8, 9, 10, 12, 13, 14, 15, 16, 17];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Common,
    Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    pub tensor_orbit: u8,
    pub variant: Variant,
}

impl ClassLabel {
    pub const fn common(tensor_orbit: u8) -> Self {
        ClassLabel {
            tensor_orbit,
            variant: Variant::Common,
        }
    }

    pub const fn extra(tensor_orbit: u8) -> Self {
        ClassLabel {
            tensor_orbit,
            variant: Variant::Extra,
        }
    }

    pub fn is_extra(&self) -> bool {
        self.variant == Variant::Extra
    }

    /// Whether this label names a class for fields of the given parity.
    pub fn valid_for(&self, odd: bool) -> bool {
        if !TENSOR_ORBITS.contains(&self.tensor_orbit) {
            return false;
        }
        match self.variant {
            Variant::Common => true,
            Variant::Extra if odd => matches!(self.tensor_orbit, 8 | 13 | 14 | 15),
            Variant::Extra => matches!(self.tensor_orbit, 8 | 12 | 13 | 16),
        }
    }

    fn check(&self, f: &FieldSpec) -> Result<(), ClassifyError> {
        if self.valid_for(f.is_odd()) {
            Ok(())
        } else {
            Err(ClassifyError::InvalidLabelForField {
                label: *self,
                q: f.q(),
            })
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.tensor_orbit)?;
        if self.is_extra() {
            write!(f, "x")?;
        }
        Ok(())
    }
}

impl FromStr for ClassLabel {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ClassifyError::BadLabel(s.to_string());
        let body = s.strip_prefix('o').ok_or_else(bad)?;
        let (num, variant) = match body.strip_suffix('x') {
            Some(n) => (n, Variant::Extra),
            None => (body, Variant::Common),
        };
        let tensor_orbit: u8 = num.parse().map_err(|_| bad())?;
        if !TENSOR_ORBITS.contains(&tensor_orbit) {
            return Err(bad());
        }
        Ok(ClassLabel {
            tensor_orbit,
            variant,
        })
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The 15 labels for a field of the given parity, in table order.
pub fn all_labels(odd: bool) -> Vec<ClassLabel> {
    let mut out = Vec::with_capacity(15);
    for t in TENSOR_ORBITS {
        out.push(ClassLabel::common(t));
        let x = ClassLabel::extra(t);
        if x.valid_for(odd) {
            out.push(x);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonicalParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<FieldElem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<FieldElem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<FieldElem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<FieldElem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<FieldElem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma17: Option<FieldElem>,
}

/// `v != 0` and `v l^2 + u v l - 1` has no root in `F_q`.
pub fn condition_star(f: &FieldSpec, u: FieldElem, v: FieldElem) -> bool {
    if v.is_zero() {
        return false;
    }
    let uv = f.mul(u, v);
    f.elements().all(|l| {
        let val = f.add(f.mul(v, f.mul(l, l)), f.mul(uv, l));
        val != FieldElem::ONE
    })
}

/// `l^3 + gamma l^2 - beta l + alpha` has no root in `F_q`.
pub fn condition_double_star(
    f: &FieldSpec,
    alpha: FieldElem,
    beta: FieldElem,
    gamma: FieldElem,
) -> bool {
    f.elements().all(|l| {
        let l2 = f.mul(l, l);
        let val = f.add(
            f.sub(f.add(f.mul(l2, l), f.mul(gamma, l2)), f.mul(beta, l)),
            alpha,
        );
        !val.is_zero()
    })
}

pub fn find_params(label: ClassLabel, f: &FieldSpec) -> Result<CanonicalParams, ClassifyError> {
    label.check(f)?;
    let none = || ClassifyError::NoParams { label, q: f.q() };
    let mut params = CanonicalParams::default();
    match (label.tensor_orbit, label.variant) {
        (8 | 13 | 14, Variant::Extra) if f.is_odd() => {
            params.gamma = Some(f.find_nonsquare()?);
        }
        (10 | 15, variant) => {
            let want_square = variant == Variant::Common;
            let (u, v) = f
                .elements()
                .flat_map(|u| f.elements().map(move |v| (u, v)))
                .find(|&(u, v)| {
                    condition_star(f, u, v)
                        && (label.tensor_orbit == 10 || f.is_square(f.neg(v)) == want_square)
                })
                .ok_or_else(none)?;
            params.u = Some(u);
            params.v = Some(v);
        }
        (17, _) => {
            let (alpha, beta, gamma) = f
                .elements()
                .flat_map(|g| {
                    f.elements()
                        .flat_map(move |b| f.elements().map(move |a| (a, b, g)))
                })
                .find(|&(a, b, g)| condition_double_star(f, a, b, g))
                .ok_or_else(none)?;
            params.alpha = Some(alpha);
            params.beta = Some(beta);
            params.gamma17 = Some(gamma);
        }
        _ => {}
    }
    Ok(params)
}

/// Builds the pencil `xA + yB` from the x-part and y-part coordinates.
fn rep(f: &FieldSpec, a: [FieldElem; 6], b: [FieldElem; 6]) -> Result<Pencil, ClassifyError> {
    Ok(Pencil::new(f, SymMat(a), SymMat(b))?)
}

pub fn canonical_rep(label: ClassLabel, f: &FieldSpec) -> Result<Pencil, ClassifyError> {
    let params = find_params(label, f)?;
    let o = FieldElem::ZERO;
    let l = FieldElem::ONE;
    let odd = f.is_odd();
    let gamma = params.gamma.unwrap_or(l);
    match (label.tensor_orbit, label.variant) {
        (5, _) => rep(f, [l, o, o, o, o, o], [o, l, o, o, o, o]),
        (6, _) => rep(f, [l, o, o, o, o, o], [o, o, o, l, o, o]),
        (8, Variant::Common) => rep(f, [l, o, o, o, o, o], [o, l, l, o, o, o]),
        (8, _) if odd => rep(f, [l, o, o, o, o, o], [o, l, gamma, o, o, o]),
        (8, _) => rep(f, [l, o, o, o, o, o], [o, o, o, o, o, l]),
        (9, _) => rep(f, [l, o, o, o, o, o], [o, l, o, o, l, o]),
        (10, _) => {
            let (u, v) = (params.u.unwrap(), params.v.unwrap());
            rep(f, [v, l, o, o, o, o], [o, u, o, l, o, o])
        }
        (12, Variant::Common) => rep(f, [o, o, o, l, o, o], [o, o, o, o, o, l]),
        (12, _) => rep(f, [o, l, o, l, o, o], [o, l, o, o, o, l]),
        (13, Variant::Common) => rep(f, [o, o, o, l, o, o], [o, l, l, o, o, o]),
        (13, _) if odd => rep(f, [o, o, o, l, o, o], [o, l, gamma, o, o, o]),
        (13, _) => rep(f, [o, l, o, l, o, o], [o, l, l, o, o, o]),
        (14, _) => rep(f, [l, gamma, o, o, o, o], [o, gamma, l, o, o, o]),
        (15, _) => {
            let (u, v) = (params.u.unwrap(), params.v.unwrap());
            rep(f, [o, u, l, l, o, o], [v, l, o, o, o, o])
        }
        (16, Variant::Common) => rep(f, [o, l, o, o, l, o], [o, o, o, o, o, l]),
        (16, _) => rep(f, [o, l, o, o, l, o], [o, o, l, o, o, l]),
        (17, _) => {
            let (a, b, g) = (
                params.alpha.unwrap(),
                params.beta.unwrap(),
                params.gamma17.unwrap(),
            );
            rep(f, [f.inv(a)?, f.neg(g), o, o, o, l], [o, b, l, l, o, o])
        }
        _ => unreachable!("label validated by find_params"),
    }
}

fn unclassifiable(profile: &InvariantProfile) -> ClassifyError {
    ClassifyError::UnclassifiableProfile(format!(
        "dist {} ext {} nucleus {} radical {}",
        profile.dist, profile.ext_count, profile.nucleus_count, profile.has_common_radical
    ))
}

fn pick(common: bool, t: u8) -> ClassLabel {
    if common {
        ClassLabel::common(t)
    } else {
        ClassLabel::extra(t)
    }
}

/// Assigns a label from the invariant profile alone.
pub fn classify_profile(
    profile: &InvariantProfile,
    f: &FieldSpec,
) -> Result<ClassLabel, ClassifyError> {
    let q = f.q();
    let odd = f.is_odd();
    let one_mod_4 = q % 4 == 1;
    let d = profile.dist;
    let bad = || unclassifiable(profile);

    if q == 2 && d == RankDist::new(0, 3, 0) {
        if profile.has_common_radical {
            return Ok(ClassLabel::common(10));
        }
        return match profile.nucleus_count {
            3 => Ok(ClassLabel::common(12)),
            1 => Ok(ClassLabel::extra(12)),
            0 => Ok(ClassLabel::common(14)),
            _ => Err(bad()),
        };
    }

    let label = match d.as_array() {
        [2, a2, 0] if a2 == q - 1 => ClassLabel::common(5),
        [1, a2, 0] if a2 == q => ClassLabel::common(6),
        [1, 0, a3] if a3 == q => ClassLabel::common(9),
        [0, 0, a3] if a3 == q + 1 => ClassLabel::common(17),
        [1, 1, a3] if a3 == q - 1 => {
            if odd {
                pick((profile.ext_count == 1) == one_mod_4, 8)
            } else {
                pick(profile.nucleus_count == 0, 8)
            }
        }
        [0, a2, 0] if a2 == q + 1 => {
            if profile.has_common_radical {
                ClassLabel::common(10)
            } else if odd || profile.nucleus_count == q + 1 {
                ClassLabel::common(12)
            } else if profile.nucleus_count == 1 {
                ClassLabel::extra(12)
            } else {
                return Err(bad());
            }
        }
        [0, 2, a3] if a3 == q - 1 => {
            if odd {
                let double = profile
                    .rank2_points
                    .iter()
                    .find(|p| p.det_multiplicity == 2)
                    .ok_or_else(bad)?;
                let ext = double.class == PointClass::Rank2(Rank2Kind::Exterior);
                pick(ext == one_mod_4, 13)
            } else {
                pick(profile.nucleus_count == 1, 13)
            }
        }
        [0, 3, a3] if a3 + 2 == q => {
            if odd {
                let expected = if one_mod_4 { 3 } else { 1 };
                pick(profile.ext_count == expected, 14)
            } else {
                ClassLabel::common(14)
            }
        }
        [0, 1, a3] if a3 == q => {
            let point = profile.rank2_points.first().ok_or_else(bad)?;
            if point.det_multiplicity == 3 {
                if odd {
                    ClassLabel::common(16)
                } else {
                    pick(point.class == PointClass::Rank2(Rank2Kind::Nucleus), 16)
                }
            } else if odd {
                pick(point.class == PointClass::Rank2(Rank2Kind::Exterior), 15)
            } else {
                ClassLabel::common(15)
            }
        }
        _ => return Err(bad()),
    };
    Ok(label)
}

pub fn classify_with(info: &impl PointInfo, p: &Pencil) -> Result<ClassLabel, ClassifyError> {
    classify_profile(&invariant_profile_with(info, p), info.field())
}

pub fn classify(p: &Pencil, f: &FieldSpec) -> Result<ClassLabel, ClassifyError> {
    classify_with(&DirectPoints(f), p)
}

/// `|PGL(3,q)| = q^3 (q^3 - 1)(q^2 - 1)`.
pub fn group_order(q: u32) -> u128 {
    let q = q as u128;
    q.pow(3) * (q.pow(3) - 1) * (q * q - 1)
}

/// Number of lines of `PG(5,q)`.
pub fn line_count(q: u32) -> u128 {
    let q = q as u128;
    (q.pow(6) - 1) * (q.pow(5) - 1) / ((q * q - 1) * (q - 1))
}

/// Closed-form stabiliser order, with the parity and residue of `q` mod 4
/// given explicitly so that the formulas can be evaluated at any integer.
pub fn stabilizer_order_formula(label: ClassLabel, q: u32, odd: bool) -> Option<u128> {
    if !label.valid_for(odd) {
        return None;
    }
    let q128 = q as u128;
    let (q, qm, qp) = (q128, q128 - 1, q128 + 1);
    let one_mod_4 = q % 4 == 1;
    let common = !label.is_extra();
    let order = match label.tensor_orbit {
        5 => 2 * q * q * qm * qm,
        6 => q.pow(3) * qm * qm,
        8 if odd => {
            if common == one_mod_4 {
                2 * qm * qm
            } else {
                2 * qm * qp
            }
        }
        8 => {
            if common {
                q * qm
            } else {
                q * qm * (q * q - 1)
            }
        }
        9 => q * q * qm,
        10 => 2 * q * q * (q * q - 1),
        12 if odd => q * qm * qm * qp,
        12 => {
            if common {
                q.pow(3) * qm * qm * qp
            } else {
                q.pow(3) * qm
            }
        }
        13 if odd => 2 * qm,
        13 => {
            if common {
                q * qm
            } else {
                q
            }
        }
        14 if odd => {
            if common == one_mod_4 {
                24
            } else {
                8
            }
        }
        14 => 6,
        15 if odd => 4,
        15 => 2,
        16 if odd => q * qm,
        16 => {
            if common {
                q * q * qm
            } else {
                q * q
            }
        }
        17 => 3,
        _ => return None,
    };
    Some(order)
}

pub fn expected_stabilizer_order(label: ClassLabel, f: &FieldSpec) -> Result<u128, ClassifyError> {
    label.check(f)?;
    Ok(stabilizer_order_formula(label, f.q(), f.is_odd()).expect("validated label"))
}

/// The per-tensor-orbit totals of symmetric line representatives.
pub fn tensor_orbit_total(tensor_orbit: u8, q: u32) -> Option<u128> {
    let k = group_order(q);
    let q = q as u128;
    let plane = q * q + q + 1;
    Some(match tensor_orbit {
        5 => q * (q + 1) * plane / 2,
        6 => (q + 1) * plane,
        8 => q.pow(4) * plane,
        9 => q * (q.pow(3) - 1) * (q + 1),
        10 => q * (q.pow(3) - 1) / 2,
        12 => q * q * plane,
        13 => q.pow(3) * (q.pow(3) - 1) * (q + 1),
        14 => k / 6,
        15 => k / 2,
        16 => q * q * (q.pow(3) - 1) * (q + 1),
        17 => k / 3,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpectedCounts {
    pub per_label: BTreeMap<ClassLabel, u128>,
    pub per_tensor: BTreeMap<u8, u128>,
    pub total: u128,
}

pub fn expected_counts(f: &FieldSpec) -> ExpectedCounts {
    let k = group_order(f.q());
    let mut per_label = BTreeMap::new();
    let mut per_tensor = BTreeMap::new();
    for label in all_labels(f.is_odd()) {
        let size = k / expected_stabilizer_order(label, f).expect("valid label");
        per_label.insert(label, size);
        *per_tensor.entry(label.tensor_orbit).or_insert(0) += size;
    }
    let total = per_tensor.values().sum();
    ExpectedCounts {
        per_label,
        per_tensor,
        total,
    }
}

/// Checks, for one parity branch at integer `q`, that the stabiliser orders
/// reproduce every per-tensor total exactly, without assuming divisibility.
pub fn branch_matches_totals(q: u32, odd: bool) -> bool {
    let k = group_order(q);
    TENSOR_ORBITS.iter().all(|&t| {
        let total = tensor_orbit_total(t, q).unwrap();
        let common = stabilizer_order_formula(ClassLabel::common(t), q, odd).unwrap();
        match stabilizer_order_formula(ClassLabel::extra(t), q, odd) {
            None => k == total * common,
            Some(extra) => k * (common + extra) == total * common * extra,
        }
    })
}

fn half(f: &FieldSpec) -> FieldElem {
    f.half().expect("odd characteristic")
}

/// The pencil-of-conics representative pair for `label`, with coefficients
/// in the basis `(X^2, Y^2, Z^2, XY, XZ, YZ)`.
///
/// For odd `q` the parameters are rescaled so that halving the cross terms
/// gives a pencil in the same class as [`canonical_rep`]; for even `q` the
/// pair is emitted with the parameters of [`find_params`] unchanged.
pub fn pencil_of_conics(
    label: ClassLabel,
    f: &FieldSpec,
) -> Result<(TernaryForm, TernaryForm), ClassifyError> {
    let params = find_params(label, f)?;
    let o = FieldElem::ZERO;
    let l = FieldElem::ONE;
    let odd = f.is_odd();
    let gamma = params.gamma.unwrap_or(l);
    let pair = |a: [FieldElem; 6], b: [FieldElem; 6]| Ok((TernaryForm(a), TernaryForm(b)));
    //                 X2 Y2 Z2 XY XZ YZ
    match (label.tensor_orbit, label.variant) {
        (5, _) => pair([l, o, o, o, o, o], [o, l, o, o, o, o]),
        (6, _) => pair([l, o, o, o, o, o], [o, o, o, l, o, o]),
        (8, Variant::Common) => pair([l, o, o, o, o, o], [o, l, l, o, o, o]),
        (8, _) if odd => pair([l, o, o, o, o, o], [o, l, gamma, o, o, o]),
        (8, _) => pair([l, o, o, o, o, o], [o, o, o, o, o, l]),
        (9, _) => pair([l, o, o, o, o, o], [o, l, o, o, l, o]),
        (10, _) => {
            let (mut u, v) = (params.u.unwrap(), params.v.unwrap());
            if odd {
                u = f.mul(u, half(f));
            }
            pair([v, l, o, o, o, o], [o, u, o, l, o, o])
        }
        (12, Variant::Common) => pair([o, o, o, l, o, o], [o, o, o, o, o, l]),
        (12, _) => pair([o, l, o, l, o, o], [o, l, o, o, o, l]),
        (13, Variant::Common) => pair([o, o, o, l, o, o], [o, l, l, o, o, o]),
        (13, _) if odd => pair([o, o, o, l, o, o], [o, l, gamma, o, o, o]),
        (13, _) => pair([o, l, o, l, o, o], [o, l, l, o, o, o]),
        (14, _) => pair([l, gamma, o, o, o, o], [o, gamma, l, o, o, o]),
        (15, _) => {
            let (u, mut v) = (params.u.unwrap(), params.v.unwrap());
            if odd {
                let h = half(f);
                v = f.mul(v, f.mul(h, h));
            }
            pair([o, u, l, l, o, o], [v, l, o, o, o, o])
        }
        (16, Variant::Common) => pair([o, l, o, o, l, o], [o, o, o, o, o, l]),
        (16, _) => pair([o, l, o, o, l, o], [o, o, l, o, o, l]),
        (17, _) => {
            let (mut a, b, mut g) = (
                params.alpha.unwrap(),
                params.beta.unwrap(),
                params.gamma17.unwrap(),
            );
            if odd {
                a = f.mul(a, f.from_int(8));
                g = f.mul(g, half(f));
            }
            pair([f.inv(a)?, f.neg(g), o, o, o, l], [o, b, l, l, o, o])
        }
        _ => unreachable!("label validated by find_params"),
    }
}
