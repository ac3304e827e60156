//! Lines of `PG(5,q)` as pencils `{xA + yB}` of symmetric matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElem, FieldSpec};
use crate::linalg;
use crate::symspace::{DirectPoints, PointClass, PointInfo, Rank2Kind, SymMat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PencilError {
    #[error("basis matrices are linearly dependent")]
    DependentBasis,
    #[error("basis matrix is zero")]
    ZeroMatrix,
}

/// A line of `PG(5,q)`. The basis is always the reduced row echelon form of
/// the span, so two pencils are equal exactly when they are the same line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pencil {
    #[serde(rename = "A")]
    a: SymMat,
    #[serde(rename = "B")]
    b: SymMat,
}

/// Reduces the 2x6 matrix with rows `a`, `b`. Returns `None` if the rank is
/// below 2.
fn rref2(f: &FieldSpec, mut a: SymMat, mut b: SymMat) -> Option<(SymMat, SymMat)> {
    let p1 = (0..6).find(|&i| !a.0[i].is_zero() || !b.0[i].is_zero())?;
    if a.0[p1].is_zero() {
        std::mem::swap(&mut a, &mut b);
    }
    a = a.scale(f, f.inv(a.0[p1]).ok()?);
    let t = b.0[p1];
    if !t.is_zero() {
        for i in 0..6 {
            b.0[i] = f.sub(b.0[i], f.mul(t, a.0[i]));
        }
    }
    let p2 = (p1 + 1..6).find(|&i| !b.0[i].is_zero())?;
    b = b.scale(f, f.inv(b.0[p2]).ok()?);
    let t = a.0[p2];
    if !t.is_zero() {
        for i in 0..6 {
            a.0[i] = f.sub(a.0[i], f.mul(t, b.0[i]));
        }
    }
    Some((a, b))
}

impl Pencil {
    pub fn new(f: &FieldSpec, a: SymMat, b: SymMat) -> Result<Self, PencilError> {
        if a.is_zero() || b.is_zero() {
            return Err(PencilError::ZeroMatrix);
        }
        let (a, b) = rref2(f, a, b).ok_or(PencilError::DependentBasis)?;
        Ok(Pencil { a, b })
    }

    /// Builds a pencil from rows already in reduced echelon form.
    pub(crate) fn from_key_unchecked(a: SymMat, b: SymMat) -> Self {
        Pencil { a, b }
    }

    pub fn a(&self) -> &SymMat {
        &self.a
    }

    pub fn b(&self) -> &SymMat {
        &self.b
    }

    /// The two key rows.
    pub fn key(&self) -> [SymMat; 2] {
        [self.a, self.b]
    }

    /// Pivot columns of the key rows.
    pub fn pivots(&self) -> (usize, usize) {
        let first = |m: &SymMat| m.0.iter().position(|x| !x.is_zero()).unwrap();
        (first(&self.a), first(&self.b))
    }

    /// `xA + yB`.
    pub fn point_at(&self, f: &FieldSpec, x: FieldElem, y: FieldElem) -> SymMat {
        SymMat::combine(f, x, &self.a, y, &self.b)
    }

    /// `A + lambda B` for `lambda` ascending, then `B`.
    pub fn points(&self, f: &FieldSpec) -> Vec<SymMat> {
        let mut pts: Vec<SymMat> = f
            .elements()
            .map(|l| self.point_at(f, FieldElem::ONE, l))
            .collect();
        pts.push(self.b);
        pts
    }

    /// Parameters `(x, y)` of the points in [`Pencil::points`] order.
    pub fn parameters(f: &FieldSpec) -> Vec<(FieldElem, FieldElem)> {
        let mut ps: Vec<_> = f.elements().map(|l| (FieldElem::ONE, l)).collect();
        ps.push((FieldElem::ZERO, FieldElem::ONE));
        ps
    }

    pub fn contains(&self, f: &FieldSpec, m: &SymMat) -> bool {
        !m.is_zero() && linalg::rank(f, &[self.a.0.to_vec(), self.b.0.to_vec(), m.0.to_vec()]) == 2
    }
}

pub fn make_pencil(f: &FieldSpec, a: SymMat, b: SymMat) -> Result<Pencil, PencilError> {
    Pencil::new(f, a, b)
}

pub fn points_on(f: &FieldSpec, p: &Pencil) -> Vec<SymMat> {
    p.points(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankDist {
    pub a1: u32,
    pub a2: u32,
    pub a3: u32,
}

impl RankDist {
    pub const fn new(a1: u32, a2: u32, a3: u32) -> Self {
        RankDist { a1, a2, a3 }
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.a1, self.a2, self.a3]
    }
}

impl std::fmt::Display for RankDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{},{}]", self.a1, self.a2, self.a3)
    }
}

pub fn rank_distribution_with(info: &impl PointInfo, p: &Pencil) -> RankDist {
    let f = info.field();
    let mut d = RankDist::new(0, 0, 0);
    for m in p.points(f) {
        match info.rank(&m) {
            1 => d.a1 += 1,
            2 => d.a2 += 1,
            _ => d.a3 += 1,
        }
    }
    d
}

pub fn rank_distribution(f: &FieldSpec, p: &Pencil) -> RankDist {
    rank_distribution_with(&DirectPoints(f), p)
}

/// A root `(x0 : y0)` of the determinant cubic, normalized so the first
/// nonzero entry is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubicRoot {
    pub x: FieldElem,
    pub y: FieldElem,
    pub multiplicity: u8,
}

/// `det(xA + yB) = c0 x^3 + c1 x^2 y + c2 x y^2 + c3 y^3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetCubic {
    pub c: [FieldElem; 4],
    pub roots: Vec<CubicRoot>,
    pub identically_zero: bool,
}

impl DetCubic {
    /// Multiplicity of the root at parameter `(x : y)`; 0 if not a root or
    /// if the cubic vanishes identically.
    pub fn multiplicity_at(&self, f: &FieldSpec, x: FieldElem, y: FieldElem) -> u8 {
        let (x, y) = normalize_param(f, x, y);
        self.roots
            .iter()
            .find(|r| r.x == x && r.y == y)
            .map_or(0, |r| r.multiplicity)
    }

    pub fn eval(&self, f: &FieldSpec, x: FieldElem, y: FieldElem) -> FieldElem {
        let [c0, c1, c2, c3] = self.c;
        let x2 = f.mul(x, x);
        let y2 = f.mul(y, y);
        let terms = [
            f.mul(c0, f.mul(x2, x)),
            f.mul(c1, f.mul(x2, y)),
            f.mul(c2, f.mul(x, y2)),
            f.mul(c3, f.mul(y2, y)),
        ];
        terms.into_iter().fold(FieldElem::ZERO, |s, t| f.add(s, t))
    }
}

fn normalize_param(f: &FieldSpec, x: FieldElem, y: FieldElem) -> (FieldElem, FieldElem) {
    if x.is_zero() {
        (FieldElem::ZERO, FieldElem::ONE)
    } else {
        (FieldElem::ONE, f.div(y, x).expect("x nonzero"))
    }
}

// Polynomials in (x, y) homogeneous of fixed degree, stored by the power of y.
fn mul_forms(f: &FieldSpec, p: &[FieldElem], r: &[FieldElem]) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::ZERO; p.len() + r.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in r.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(a, b));
        }
    }
    out
}

const PERMS: [([usize; 3], bool); 6] = [
    ([0, 1, 2], true),
    ([0, 2, 1], false),
    ([1, 0, 2], false),
    ([1, 2, 0], true),
    ([2, 0, 1], true),
    ([2, 1, 0], false),
];

/// Coefficients of `det(xA + yB)` by the Leibniz expansion.
pub fn det_coefficients(f: &FieldSpec, a: &SymMat, b: &SymMat) -> [FieldElem; 4] {
    let mut c = [FieldElem::ZERO; 4];
    for (perm, even) in PERMS {
        let mut prod = vec![FieldElem::ONE];
        for (i, &j) in perm.iter().enumerate() {
            prod = mul_forms(f, &prod, &[a.entry(i, j), b.entry(i, j)]);
        }
        for k in 0..4 {
            c[k] = if even {
                f.add(c[k], prod[k])
            } else {
                f.sub(c[k], prod[k])
            };
        }
    }
    c
}

/// Divides `g(t) = sum g_i t^i` by `(t - r)` as often as possible.
fn root_multiplicity(f: &FieldSpec, g: &[FieldElem], r: FieldElem) -> u8 {
    let mut poly: Vec<FieldElem> = g.to_vec();
    while poly.len() > 1 && poly.last().unwrap().is_zero() {
        poly.pop();
    }
    let mut mult = 0;
    while poly.len() > 1 {
        // synthetic division from the top coefficient
        let n = poly.len() - 1;
        let mut quot = vec![FieldElem::ZERO; n];
        let mut carry = FieldElem::ZERO;
        for i in (0..=n).rev() {
            let v = f.add(poly[i], f.mul(carry, r));
            if i == 0 {
                carry = v;
            } else {
                quot[i - 1] = v;
                carry = v;
            }
        }
        if !carry.is_zero() {
            break;
        }
        mult += 1;
        poly = quot;
    }
    mult
}

pub fn det_cubic(f: &FieldSpec, p: &Pencil) -> DetCubic {
    let c = det_coefficients(f, &p.a, &p.b);
    let identically_zero = c.iter().all(|x| x.is_zero());
    let mut roots = Vec::new();
    if !identically_zero {
        // (0 : 1): the power of x dividing f.
        let m0 = c.iter().rev().take_while(|x| x.is_zero()).count() as u8;
        // (1 : t): f(1, t) = c0 + c1 t + c2 t^2 + c3 t^3.
        for t in f.elements() {
            let m = root_multiplicity(f, &c, t);
            if m > 0 {
                roots.push(CubicRoot {
                    x: FieldElem::ONE,
                    y: t,
                    multiplicity: m,
                });
            }
        }
        if m0 > 0 {
            roots.push(CubicRoot {
                x: FieldElem::ZERO,
                y: FieldElem::ONE,
                multiplicity: m0,
            });
        }
        debug_assert!(roots.iter().map(|r| r.multiplicity as u32).sum::<u32>() <= 3);
    }
    DetCubic {
        c,
        roots,
        identically_zero,
    }
}

/// A nonzero `v` with `Av = Bv = 0`, normalized, if one exists.
pub fn common_radical(f: &FieldSpec, p: &Pencil) -> Option<[FieldElem; 3]> {
    let a = p.a.to_mat3();
    let b = p.b.to_mat3();
    let rows: Vec<Vec<FieldElem>> = a.iter().chain(b.iter()).map(|r| r.to_vec()).collect();
    let ns = linalg::nullspace(f, &rows);
    let v = ns.first()?;
    let v = linalg::normalize(f, v)?;
    Some([v[0], v[1], v[2]])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rank2Point {
    pub point: SymMat,
    pub class: PointClass,
    pub det_multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvariantProfile {
    pub dist: RankDist,
    pub has_common_radical: bool,
    pub rank2_points: Vec<Rank2Point>,
    pub ext_count: u32,
    pub nucleus_count: u32,
    pub q_mod4: Option<u32>,
}

pub fn invariant_profile_with(info: &impl PointInfo, p: &Pencil) -> InvariantProfile {
    let f = info.field();
    let cubic = det_cubic(f, p);
    let mut dist = RankDist::new(0, 0, 0);
    let mut rank2_points = Vec::new();
    let mut ext_count = 0;
    let mut nucleus_count = 0;
    for (x, y) in Pencil::parameters(f) {
        let m = p.point_at(f, x, y);
        let class = info.class(&m);
        match class {
            PointClass::Rank1 => dist.a1 += 1,
            PointClass::Rank3 => dist.a3 += 1,
            PointClass::Rank2(kind) => {
                dist.a2 += 1;
                match kind {
                    Rank2Kind::Exterior => ext_count += 1,
                    Rank2Kind::Nucleus => nucleus_count += 1,
                    _ => {}
                }
                rank2_points.push(Rank2Point {
                    point: m.normalized(f).expect("nonzero"),
                    class,
                    det_multiplicity: cubic.multiplicity_at(f, x, y),
                });
            }
        }
        debug_assert!(
            cubic.identically_zero || (class.rank() < 3) == (cubic.multiplicity_at(f, x, y) > 0),
            "determinant roots disagree with ranks on {p:?}"
        );
    }
    rank2_points.sort_by_key(|a| a.point);
    InvariantProfile {
        dist,
        has_common_radical: common_radical(f, p).is_some(),
        rank2_points,
        ext_count,
        nucleus_count,
        q_mod4: f.is_odd().then_some(f.q() % 4),
    }
}

pub fn invariant_profile(f: &FieldSpec, p: &Pencil) -> InvariantProfile {
    invariant_profile_with(&DirectPoints(f), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symspace::{det3, Mat3};
    use proptest::prelude::*;

    fn field(q: u32) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    fn sm(f: &FieldSpec, c: [u32; 6]) -> SymMat {
        SymMat::from_codes(f, &c).unwrap()
    }

    fn pencil(f: &FieldSpec, a: [u32; 6], b: [u32; 6]) -> Pencil {
        Pencil::new(f, sm(f, a), sm(f, b)).unwrap()
    }

    #[test]
    fn make_pencil_examples() {
        let f = field(3);
        let p = pencil(&f, [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]);
        assert_eq!(
            p.key(),
            [sm(&f, [1, 0, 0, 0, 0, 0]), sm(&f, [0, 1, 0, 0, 0, 0])]
        );
        assert_eq!(pencil(&f, [1, 1, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]), p);
        assert_eq!(
            Pencil::new(&f, sm(&f, [1, 0, 0, 0, 0, 0]), sm(&f, [2, 0, 0, 0, 0, 0])),
            Err(PencilError::DependentBasis)
        );
        assert_eq!(
            Pencil::new(&f, SymMat::ZERO, sm(&f, [2, 0, 0, 0, 0, 0])),
            Err(PencilError::ZeroMatrix)
        );
    }

    #[test]
    fn points_on_examples() {
        let f = field(2);
        let p = pencil(&f, [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]);
        assert_eq!(
            points_on(&f, &p),
            vec![
                sm(&f, [1, 0, 0, 0, 0, 0]),
                sm(&f, [1, 1, 0, 0, 0, 0]),
                sm(&f, [0, 1, 0, 0, 0, 0])
            ]
        );
        let f5 = field(5);
        assert_eq!(
            points_on(&f5, &pencil(&f5, [1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 1])).len(),
            6
        );
    }

    #[test]
    fn rank_distribution_examples() {
        let f = field(3);
        let o5 = pencil(&f, [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]);
        assert_eq!(rank_distribution(&f, &o5), RankDist::new(2, 2, 0));
        // rows (x,0,y / 0,y,0 / y,0,0)
        let o9 = pencil(&f, [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 1, 0]);
        assert_eq!(rank_distribution(&f, &o9), RankDist::new(1, 0, 3));
        // (. x . / x y . / . . y)
        let f5 = field(5);
        let o13 = pencil(&f5, [0, 0, 0, 1, 0, 0], [0, 1, 1, 0, 0, 0]);
        assert_eq!(rank_distribution(&f5, &o13), RankDist::new(0, 2, 4));
    }

    #[test]
    fn det_cubic_examples() {
        let f = field(5);
        // (. . x / . x y / x y .): det = -x^3
        let o16 = pencil(&f, [0, 1, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]);
        let c = det_cubic(&f, &o16);
        assert_eq!(
            c.c,
            [
                f.neg(FieldElem::ONE),
                FieldElem::ZERO,
                FieldElem::ZERO,
                FieldElem::ZERO
            ]
        );
        assert_eq!(
            c.roots,
            vec![CubicRoot {
                x: FieldElem::ZERO,
                y: FieldElem::ONE,
                multiplicity: 3
            }]
        );
        let prof = invariant_profile(&f, &o16);
        assert_eq!(prof.dist, RankDist::new(0, 1, 5));
        assert_eq!(prof.rank2_points[0].det_multiplicity, 3);

        // (. y . / y x . / . . x) in the stored basis: det = -x y^2
        let o13 = pencil(&f, [0, 0, 0, 1, 0, 0], [0, 1, 1, 0, 0, 0]);
        assert_eq!(o13.a().codes(), [0, 1, 1, 0, 0, 0]);
        let c = det_cubic(&f, &o13);
        assert_eq!(
            c.c,
            [
                FieldElem::ZERO,
                FieldElem::ZERO,
                f.neg(FieldElem::ONE),
                FieldElem::ZERO
            ]
        );
        assert_eq!(c.multiplicity_at(&f, FieldElem::ZERO, FieldElem::ONE), 1);
        assert_eq!(c.multiplicity_at(&f, FieldElem::ONE, FieldElem::ZERO), 2);

        let o5 = pencil(&f, [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]);
        assert!(det_cubic(&f, &o5).identically_zero);
    }

    #[test]
    fn det_cubic_at_q2_uses_all_coefficients() {
        // PG(1,2) has 3 points, so a cubic is not determined by its values.
        let f = field(2);
        let p = pencil(&f, [1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]);
        let c = det_cubic(&f, &p);
        for (x, y) in [(0u8, 1u8), (1, 0), (1, 1), (2, 3)] {
            if x < 2 && y < 2 {
                let (x, y) = (FieldElem::from_code(x), FieldElem::from_code(y));
                assert_eq!(c.eval(&f, x, y), p.point_at(&f, x, y).det(&f));
            }
        }
    }

    #[test]
    fn common_radical_examples() {
        let f = field(3);
        let e3 = Some([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]);
        let o5 = pencil(&f, [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]);
        assert_eq!(common_radical(&f, &o5), e3);
        let o10 = pencil(&f, [1, 1, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0]);
        assert_eq!(common_radical(&f, &o10), e3);
        let o12 = pencil(&f, [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1]);
        assert_eq!(common_radical(&f, &o12), None);
    }

    #[test]
    fn profile_examples() {
        let f5 = field(5);
        // o14 common: (x . . / . x+y . / . . y)
        let o14 = pencil(&f5, [1, 1, 0, 0, 0, 0], [0, 1, 1, 0, 0, 0]);
        let p = invariant_profile(&f5, &o14);
        assert_eq!(
            (p.dist, p.ext_count, p.q_mod4),
            (RankDist::new(0, 3, 3), 3, Some(1))
        );
        let f4 = field(4);
        let o12 = pencil(&f4, [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1]);
        let p = invariant_profile(&f4, &o12);
        assert_eq!(p.nucleus_count, 5);
        assert_eq!(p.q_mod4, None);
        let f3 = field(3);
        // o10 with u = 0, v = 1 over F_3: (x . . / . y . ) is not external; use (x y / y -x)
        let o10 = pencil(&f3, [1, 2, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0]);
        let p = invariant_profile(&f3, &o10);
        assert_eq!((p.dist, p.ext_count), (RankDist::new(0, 4, 0), 2));
        assert!(p.has_common_radical);
        assert_eq!(p.rank2_points.len(), 4);
    }

    // Every rank <= 2 point is a root of the cubic and vice versa.
    #[test]
    fn roots_match_singular_points_exhaustive() {
        for q in [2, 3, 4] {
            let f = field(q);
            let n = (q as usize).pow(6);
            for i in (1..n).step_by(7) {
                for j in (1..n).step_by(11) {
                    let Ok(p) = Pencil::new(&f, SymMat::from_index(i, q), SymMat::from_index(j, q))
                    else {
                        continue;
                    };
                    let cubic = det_cubic(&f, &p);
                    if cubic.identically_zero {
                        continue;
                    }
                    let total: u32 = cubic.roots.iter().map(|r| r.multiplicity as u32).sum();
                    assert!(total <= 3);
                    for (x, y) in Pencil::parameters(&f) {
                        let singular = p.point_at(&f, x, y).det(&f).is_zero();
                        assert_eq!(singular, cubic.multiplicity_at(&f, x, y) > 0);
                    }
                }
            }
        }
    }

    #[test]
    fn distribution_never_all_rank_one() {
        let f = field(3);
        let n = 3usize.pow(6);
        for i in 1..n {
            for j in (i + 1..n).step_by(5) {
                if let Ok(p) = Pencil::new(&f, SymMat::from_index(i, 3), SymMat::from_index(j, 3)) {
                    assert_ne!(rank_distribution(&f, &p).a1, 4);
                }
            }
        }
    }

    fn arb_case() -> impl Strategy<Value = (u32, Vec<u8>, Vec<u8>)> {
        prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9]).prop_flat_map(|q| {
            (
                Just(q),
                prop::collection::vec(0..q as u8, 12),
                prop::collection::vec(0..q as u8, 13),
            )
        })
    }

    fn sym(codes: &[u8]) -> SymMat {
        SymMat(std::array::from_fn(|i| FieldElem::from_code(codes[i])))
    }

    fn mat(codes: &[u8]) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| FieldElem::from_code(codes[3 * i + j])))
    }

    fn multiplicities(c: &DetCubic) -> Vec<u8> {
        let mut m: Vec<u8> = c.roots.iter().map(|r| r.multiplicity).collect();
        m.sort();
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn key_independent_of_basis((q, m, g) in arb_case()) {
            let f = field(q);
            let p = Pencil::new(&f, sym(&m[..6]), sym(&m[6..]));
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let e = |i: usize| FieldElem::from_code(g[i]);
            let (s, t, u, v) = (e(0), e(1), e(2), e(3));
            prop_assume!(!f.sub(f.mul(s, v), f.mul(t, u)).is_zero());
            let a2 = SymMat::combine(&f, s, p.a(), t, p.b());
            let b2 = SymMat::combine(&f, u, p.a(), v, p.b());
            prop_assert_eq!(Pencil::new(&f, a2, b2).unwrap(), p);
        }

        #[test]
        fn distribution_and_multiplicities_congruence_invariant((q, m, g) in arb_case()) {
            let f = field(q);
            let p = Pencil::new(&f, sym(&m[..6]), sym(&m[6..]));
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let d = mat(&g[..9]);
            prop_assume!(!det3(&f, &d).is_zero());
            let img = Pencil::new(&f, p.a().congruence(&f, &d), p.b().congruence(&f, &d)).unwrap();
            prop_assert_eq!(rank_distribution(&f, &img), rank_distribution(&f, &p));
            let (c1, c2) = (det_cubic(&f, &p), det_cubic(&f, &img));
            prop_assert_eq!(c1.identically_zero, c2.identically_zero);
            prop_assert_eq!(multiplicities(&c1), multiplicities(&c2));
            let d = rank_distribution(&f, &p);
            prop_assert_eq!(d.a1 + d.a2 + d.a3, q + 1);
        }
    }
}
