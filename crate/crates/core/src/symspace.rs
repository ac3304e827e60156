//! Symmetric 3x3 matrices over `F_q`, viewed as points of `PG(5,q)`.
//!
//! Coordinates are stored in the order `(m11, m22, m33, m12, m13, m23)`.
//! Rank-1 points are exactly the Veronese images `u u^T`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElem, FieldSpec};

/// Largest `q` for which exhaustive point tables are built.
pub const MAX_TABLE_Q: u32 = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("the zero matrix is not a projective point")]
    ZeroMatrix,
    #[error("q = {q} exceeds the limit {limit} for this operation")]
    FieldTooLarge { q: u32, limit: u32 },
    #[error("expected 6 coordinates, got {0}")]
    BadLength(usize),
    #[error("coordinate {code} out of range for F_{q}")]
    BadCode { code: u32, q: u32 },
}

pub type Mat3 = [[FieldElem; 3]; 3];

pub fn identity() -> Mat3 {
    let mut m = [[FieldElem::ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = FieldElem::ONE;
    }
    m
}

pub fn mat_mul(f: &FieldSpec, a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[FieldElem::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = FieldElem::ZERO;
            for k in 0..3 {
                s = f.add(s, f.mul(a[i][k], b[k][j]));
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = *a;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn det3(f: &FieldSpec, m: &Mat3) -> FieldElem {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        f.sub(f.mul(m[r1][c1], m[r2][c2]), f.mul(m[r1][c2], m[r2][c1]))
    };
    let t0 = f.mul(m[0][0], minor(1, 2, 1, 2));
    let t1 = f.mul(m[0][1], minor(1, 2, 0, 2));
    let t2 = f.mul(m[0][2], minor(1, 2, 0, 1));
    f.add(f.sub(t0, t1), t2)
}

/// Matrix rank by Gaussian elimination on a copy.
pub fn rank3(f: &FieldSpec, m: &Mat3) -> u8 {
    let mut a = *m;
    let mut r = 0;
    for c in 0..3 {
        let Some(p) = (r..3).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = f.inv(a[r][c]).expect("pivot is nonzero");
        for i in r + 1..3 {
            if !a[i][c].is_zero() {
                let factor = f.mul(a[i][c], inv);
                for j in c..3 {
                    a[i][j] = f.sub(a[i][j], f.mul(factor, a[r][j]));
                }
            }
        }
        r += 1;
    }
    r as u8
}

/// A symmetric 3x3 matrix stored by its 6 independent entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymMat(pub [FieldElem; 6]);

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Positions of the entries `(i, j)` in the 6-coordinate order.
pub const COORD_INDEX: [[usize; 3]; 3] = [[0, 3, 4], [3, 1, 5], [4, 5, 2]];

impl SymMat {
    pub const ZERO: SymMat = SymMat([FieldElem::ZERO; 6]);

    pub fn from_codes(f: &FieldSpec, codes: &[u32]) -> Result<Self, SymError> {
        if codes.len() != 6 {
            return Err(SymError::BadLength(codes.len()));
        }
        let mut c = [FieldElem::ZERO; 6];
        for (slot, &code) in c.iter_mut().zip(codes) {
            *slot = f
                .elem(code)
                .map_err(|_| SymError::BadCode { code, q: f.q() })?;
        }
        Ok(SymMat(c))
    }

    pub fn codes(&self) -> [u32; 6] {
        self.0.map(|x| x.code() as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> FieldElem {
        self.0[COORD_INDEX[i][j]]
    }

    pub fn to_mat3(&self) -> Mat3 {
        let mut m = [[FieldElem::ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.entry(i, j);
            }
        }
        m
    }

    /// Reads the upper triangle of `m`; symmetry of `m` is the caller's
    /// responsibility.
    pub fn from_mat3(m: &Mat3) -> Self {
        SymMat([m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]])
    }

    pub fn diag(a: FieldElem, b: FieldElem, c: FieldElem) -> Self {
        SymMat([a, b, c, FieldElem::ZERO, FieldElem::ZERO, FieldElem::ZERO])
    }

    pub fn add(&self, f: &FieldSpec, other: &SymMat) -> SymMat {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(other.0) {
            *x = f.add(*x, y);
        }
        SymMat(c)
    }

    pub fn scale(&self, f: &FieldSpec, s: FieldElem) -> SymMat {
        SymMat(self.0.map(|x| f.mul(s, x)))
    }

    /// `x A + y B`.
    pub fn combine(f: &FieldSpec, x: FieldElem, a: &SymMat, y: FieldElem, b: &SymMat) -> SymMat {
        let mut c = [FieldElem::ZERO; 6];
        for i in 0..6 {
            c[i] = f.add(f.mul(x, a.0[i]), f.mul(y, b.0[i]));
        }
        SymMat(c)
    }

    /// `D M D^T`.
    pub fn congruence(&self, f: &FieldSpec, d: &Mat3) -> SymMat {
        let m = self.to_mat3();
        let dm = mat_mul(f, d, &m);
        let mut out = [FieldElem::ZERO; 6];
        for (k, (i, j)) in [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
            .into_iter()
            .enumerate()
        {
            let mut s = FieldElem::ZERO;
            for l in 0..3 {
                s = f.add(s, f.mul(dm[i][l], d[j][l]));
            }
            out[k] = s;
        }
        SymMat(out)
    }

    pub fn det(&self, f: &FieldSpec) -> FieldElem {
        det3(f, &self.to_mat3())
    }

    /// The adjugate, which is again symmetric.
    pub fn adjugate(&self, f: &FieldSpec) -> SymMat {
        let m = self.to_mat3();
        let cof = |i: usize, j: usize| {
            let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let d = f.sub(
                f.mul(m[rows[0]][cols[0]], m[rows[1]][cols[1]]),
                f.mul(m[rows[0]][cols[1]], m[rows[1]][cols[0]]),
            );
            if (i + j).is_multiple_of(2) {
                d
            } else {
                f.neg(d)
            }
        };
        SymMat([
            cof(0, 0),
            cof(1, 1),
            cof(2, 2),
            cof(0, 1),
            cof(0, 2),
            cof(1, 2),
        ])
    }

    /// `x^T M x`.
    pub fn quad_form(&self, f: &FieldSpec, x: &[FieldElem; 3]) -> FieldElem {
        let mut s = FieldElem::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                s = f.add(s, f.mul(self.entry(i, j), f.mul(x[i], x[j])));
            }
        }
        s
    }

    /// Scales so that the first nonzero coordinate is 1.
    pub fn normalized(&self, f: &FieldSpec) -> Option<SymMat> {
        let lead = *self.0.iter().find(|x| !x.is_zero())?;
        let inv = f.inv(lead).ok()?;
        Some(self.scale(f, inv))
    }

    /// Mixed-radix index `sum c_i q^i` of the coordinate vector.
    #[inline]
    pub fn index(&self, q: u32) -> usize {
        self.0
            .iter()
            .rev()
            .fold(0usize, |acc, x| acc * q as usize + x.code() as usize)
    }

    pub fn from_index(mut idx: usize, q: u32) -> SymMat {
        let mut c = [FieldElem::ZERO; 6];
        for slot in c.iter_mut() {
            *slot = FieldElem::from_code((idx % q as usize) as u8);
            idx /= q as usize;
        }
        SymMat(c)
    }
}

/// A point of `PG(2,q)` with first nonzero coordinate 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint2([FieldElem; 3]);

impl ProjPoint2 {
    pub fn new(f: &FieldSpec, v: [FieldElem; 3]) -> Option<Self> {
        let lead = *v.iter().find(|x| !x.is_zero())?;
        let inv = f.inv(lead).ok()?;
        Some(ProjPoint2(v.map(|x| f.mul(x, inv))))
    }

    pub fn coords(&self) -> [FieldElem; 3] {
        self.0
    }

    /// All `q^2 + q + 1` points in ascending coordinate order.
    pub fn all(f: &FieldSpec) -> Vec<ProjPoint2> {
        let mut pts = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let v = [a, b, c];
                    let lead = v.iter().find(|x| !x.is_zero());
                    if lead == Some(&FieldElem::ONE) {
                        pts.push(ProjPoint2(v));
                    }
                }
            }
        }
        pts
    }
}

/// `u u^T`.
pub fn veronese(f: &FieldSpec, u: &ProjPoint2) -> SymMat {
    let [a, b, c] = u.0;
    SymMat([
        f.mul(a, a),
        f.mul(b, b),
        f.mul(c, c),
        f.mul(a, b),
        f.mul(a, c),
        f.mul(b, c),
    ])
}

pub fn mat_rank(f: &FieldSpec, m: &SymMat) -> u8 {
    rank3(f, &m.to_mat3())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rank2Kind {
    /// Odd `q`: the degenerate conic is a pair of rational lines.
    Exterior,
    /// Odd `q`: a pair of conjugate lines over `F_{q^2}`.
    Interior,
    /// Even `q`: zero diagonal.
    Nucleus,
    NonNucleus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointClass {
    Rank1,
    Rank2(Rank2Kind),
    Rank3,
}

impl PointClass {
    pub fn rank(self) -> u8 {
        match self {
            PointClass::Rank1 => 1,
            PointClass::Rank2(_) => 2,
            PointClass::Rank3 => 3,
        }
    }

    pub fn kind(self) -> Option<Rank2Kind> {
        match self {
            PointClass::Rank2(k) => Some(k),
            _ => None,
        }
    }
}

/// Number of projective zeros of `x^T M x` in `PG(2,q)`.
pub fn projective_zero_count(f: &FieldSpec, m: &SymMat) -> u32 {
    let mut n = 0;
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                let v = [a, b, c];
                if v.iter().find(|x| !x.is_zero()) != Some(&FieldElem::ONE) {
                    continue;
                }
                if m.quad_form(f, &v).is_zero() {
                    n += 1;
                }
            }
        }
    }
    n
}

fn rank2_kind(f: &FieldSpec, m: &SymMat) -> Rank2Kind {
    if f.is_odd() {
        let q = f.q();
        match projective_zero_count(f, m) {
            n if n == 2 * q + 1 => Rank2Kind::Exterior,
            1 => Rank2Kind::Interior,
            n => panic!("rank-2 form {m:?} over F_{q} has {n} projective zeros"),
        }
    } else if m.0[0].is_zero() && m.0[1].is_zero() && m.0[2].is_zero() {
        Rank2Kind::Nucleus
    } else {
        Rank2Kind::NonNucleus
    }
}

pub fn point_class(f: &FieldSpec, m: &SymMat) -> Result<PointClass, SymError> {
    match mat_rank(f, m) {
        0 => Err(SymError::ZeroMatrix),
        1 => Ok(PointClass::Rank1),
        2 => Ok(PointClass::Rank2(rank2_kind(f, m))),
        _ => Ok(PointClass::Rank3),
    }
}

/// Calls `visit` on every normalized nonzero vector of `F_q^6`, in index order.
pub fn for_each_point(f: &FieldSpec, mut visit: impl FnMut(SymMat)) {
    let q = f.q();
    let total = (q as usize).pow(6);
    for idx in 1..total {
        let m = SymMat::from_index(idx, q);
        if m.0.iter().find(|x| !x.is_zero()) == Some(&FieldElem::ONE) {
            visit(m);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointCensus {
    pub q: u32,
    pub rank1: u64,
    pub exterior: u64,
    pub interior: u64,
    pub nucleus: u64,
    pub non_nucleus: u64,
    pub rank3: u64,
}

impl PointCensus {
    pub fn total(&self) -> u64 {
        self.rank1 + self.exterior + self.interior + self.nucleus + self.non_nucleus + self.rank3
    }

    /// The closed-form point-orbit sizes for `q`.
    pub fn expected(q: u32) -> PointCensus {
        let q = q as u64;
        let plane = q * q + q + 1;
        let mut c = PointCensus {
            q: q as u32,
            rank1: plane,
            rank3: q.pow(5) - q * q,
            ..Default::default()
        };
        if q % 2 == 1 {
            c.exterior = q * (q + 1) * plane / 2;
            c.interior = q * (q - 1) * plane / 2;
        } else {
            c.nucleus = plane;
            c.non_nucleus = (q * q - 1) * plane;
        }
        c
    }

    fn record(&mut self, class: PointClass) {
        match class {
            PointClass::Rank1 => self.rank1 += 1,
            PointClass::Rank2(Rank2Kind::Exterior) => self.exterior += 1,
            PointClass::Rank2(Rank2Kind::Interior) => self.interior += 1,
            PointClass::Rank2(Rank2Kind::Nucleus) => self.nucleus += 1,
            PointClass::Rank2(Rank2Kind::NonNucleus) => self.non_nucleus += 1,
            PointClass::Rank3 => self.rank3 += 1,
        }
    }
}

/// Counts the points of `PG(5,q)` in each class by enumeration.
pub fn point_census(f: &FieldSpec) -> Result<PointCensus, SymError> {
    let table = PointTable::new(f)?;
    let mut c = PointCensus {
        q: f.q(),
        ..Default::default()
    };
    for_each_point(f, |m| c.record(table.class(&m)));
    Ok(c)
}

/// Source of point classes for pencil computations.
pub trait PointInfo: Sync {
    fn field(&self) -> &FieldSpec;

    /// Class of a nonzero matrix.
    fn class(&self, m: &SymMat) -> PointClass;

    fn rank(&self, m: &SymMat) -> u8 {
        self.class(m).rank()
    }
}

/// Computes every class from scratch.
pub struct DirectPoints<'a>(pub &'a FieldSpec);

impl PointInfo for DirectPoints<'_> {
    fn field(&self) -> &FieldSpec {
        self.0
    }

    fn class(&self, m: &SymMat) -> PointClass {
        point_class(self.0, m).expect("nonzero matrix")
    }
}

const CLASS_CODES: [PointClass; 6] = [
    PointClass::Rank1,
    PointClass::Rank2(Rank2Kind::Exterior),
    PointClass::Rank2(Rank2Kind::Interior),
    PointClass::Rank2(Rank2Kind::Nucleus),
    PointClass::Rank2(Rank2Kind::NonNucleus),
    PointClass::Rank3,
];

const NO_CLASS: u8 = u8::MAX;

/// Class of every vector of `F_q^6`, indexed by [`SymMat::index`].
pub struct PointTable {
    field: FieldSpec,
    classes: Vec<u8>,
}

impl PointTable {
    pub fn new(f: &FieldSpec) -> Result<Self, SymError> {
        let q = f.q();
        if q > MAX_TABLE_Q {
            return Err(SymError::FieldTooLarge {
                q,
                limit: MAX_TABLE_Q,
            });
        }
        let mut classes = vec![NO_CLASS; (q as usize).pow(6)];
        let scalars: Vec<FieldElem> = f.nonzero_elements().collect();
        for_each_point(f, |m| {
            let class = point_class(f, &m).expect("nonzero");
            let code = CLASS_CODES.iter().position(|&c| c == class).unwrap() as u8;
            for &s in &scalars {
                classes[m.scale(f, s).index(q)] = code;
            }
        });
        Ok(PointTable {
            field: f.clone(),
            classes,
        })
    }
}

impl PointInfo for PointTable {
    fn field(&self) -> &FieldSpec {
        &self.field
    }

    #[inline]
    fn class(&self, m: &SymMat) -> PointClass {
        let code = self.classes[m.index(self.field.q())];
        assert!(code != NO_CLASS, "zero matrix has no class");
        CLASS_CODES[code as usize]
    }
}
