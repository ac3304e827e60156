//! Brute-force ground truth: `PGL(3,q)` enumeration, the congruence action on
//! lines, orbit partitions by union-find, stabilisers, and exhaustive checks
//! of the counting statements about rank-3 points.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{
    all_labels, canonical_rep, classify_with, expected_counts, group_order, line_count,
    pencil_of_conics, tensor_orbit_total, ClassLabel, ClassifyError, TENSOR_ORBITS,
};
use crate::forms::{matrix_of_form, TernaryForm};
use crate::gf::{FieldElem, FieldSpec};
use crate::linalg;
use crate::pencil::{rank_distribution_with, Pencil, RankDist};
use crate::symspace::{
    det3, identity, mat_mul, veronese, Mat3, PointInfo, PointTable, ProjPoint2, SymError, SymMat,
};

pub const MAX_GROUP_Q: u32 = 7;
pub const MAX_STABILIZER_Q: u32 = 5;
pub const MAX_ORACLE_Q: u32 = 4;
pub const MAX_CLASSIFIER_Q: u32 = 9;
pub const MAX_LEMMA_Q: u32 = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("q = {q} exceeds the limit {limit} for this operation")]
    FieldTooLarge { q: u32, limit: u32 },
    #[error("classifier says {classifier}, oracle says {oracle} for line {witness:?}")]
    Mismatch {
        witness: Pencil,
        classifier: ClassLabel,
        oracle: String,
    },
    #[error("check {name} failed: {witness}")]
    CheckFailed { name: String, witness: String },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

fn limit(f: &FieldSpec, limit: u32) -> Result<(), OrbitError> {
    if f.q() > limit {
        Err(OrbitError::FieldTooLarge { q: f.q(), limit })
    } else {
        Ok(())
    }
}

/// Runs `op` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, op: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(op),
        _ => op(),
    }
}

/// An element of `PGL(3,q)`, scaled so the first nonzero entry in row-major
/// order is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem(Mat3);

impl GroupElem {
    /// Normalizes an invertible matrix; `None` if singular.
    pub fn new(f: &FieldSpec, m: Mat3) -> Option<Self> {
        if det3(f, &m).is_zero() {
            return None;
        }
        let lead = *m.iter().flatten().find(|x| !x.is_zero())?;
        let inv = f.inv(lead).ok()?;
        Some(GroupElem(m.map(|row| row.map(|x| f.mul(x, inv)))))
    }

    pub fn identity() -> Self {
        GroupElem(identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn compose(&self, f: &FieldSpec, other: &GroupElem) -> GroupElem {
        GroupElem::new(f, mat_mul(f, &self.0, &other.0)).expect("product of invertible matrices")
    }
}

fn all_vectors(f: &FieldSpec) -> Vec<[FieldElem; 3]> {
    let mut out = Vec::with_capacity((f.q() as usize).pow(3));
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Visits every group element whose first row is `row1`.
fn for_each_with_first_row(
    f: &FieldSpec,
    row1: [FieldElem; 3],
    vectors: &[[FieldElem; 3]],
    mut visit: impl FnMut(&Mat3),
) {
    for r2 in vectors {
        for r3 in vectors {
            let m = [row1, *r2, *r3];
            if !det3(f, &m).is_zero() {
                visit(&m);
            }
        }
    }
}

/// Every element of `PGL(3,q)` exactly once.
pub fn group_elements(f: &FieldSpec) -> Result<Vec<GroupElem>, OrbitError> {
    limit(f, MAX_GROUP_Q)?;
    let vectors = all_vectors(f);
    let mut out = Vec::with_capacity(group_order(f.q()) as usize);
    for row1 in ProjPoint2::all(f) {
        for_each_with_first_row(f, row1.coords(), &vectors, |m| out.push(GroupElem(*m)));
    }
    Ok(out)
}

/// `<D A D^T, D B D^T>`.
pub fn act(f: &FieldSpec, d: &GroupElem, p: &Pencil) -> Pencil {
    act_matrix(f, &d.0, p)
}

fn act_matrix(f: &FieldSpec, d: &Mat3, p: &Pencil) -> Pencil {
    Pencil::new(f, p.a().congruence(f, d), p.b().congruence(f, d))
        .expect("congruence preserves independence")
}

/// The generators used for orbit partitions: the monomial matrix sending
/// `e1 -> w e2, e2 -> e3, e3 -> e1` for a primitive `w`, and the
/// transvection `I + E12`.
pub fn generators(f: &FieldSpec) -> Vec<GroupElem> {
    let o = FieldElem::ZERO;
    let l = FieldElem::ONE;
    let w = f.primitive_element();
    let cycle = [[o, o, l], [w, o, o], [o, l, o]];
    let transvection = [[l, l, o], [o, l, o], [o, o, l]];
    vec![
        GroupElem::new(f, cycle).unwrap(),
        GroupElem::new(f, transvection).unwrap(),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilizerReport {
    pub order: u128,
    pub sample_elements: Vec<GroupElem>,
}

/// Counts `D` in `PGL(3,q)` with `act(D, p) = p` by sweeping the group.
pub fn stabilizer_order(f: &FieldSpec, p: &Pencil) -> Result<StabilizerReport, OrbitError> {
    limit(f, MAX_STABILIZER_Q)?;
    let vectors = all_vectors(f);
    let rows = ProjPoint2::all(f);
    let blocks: Vec<(u128, Vec<GroupElem>)> = rows
        .par_iter()
        .map(|row1| {
            let mut count = 0u128;
            let mut sample = Vec::new();
            for_each_with_first_row(f, row1.coords(), &vectors, |m| {
                if act_matrix(f, m, p) == *p {
                    count += 1;
                    if sample.len() < 10 {
                        sample.push(GroupElem(*m));
                    }
                }
            });
            (count, sample)
        })
        .collect();
    let order = blocks.iter().map(|b| b.0).sum();
    let sample_elements = blocks.into_iter().flat_map(|b| b.1).take(10).collect();
    Ok(StabilizerReport {
        order,
        sample_elements,
    })
}

// Dense indexing of lines. A line is the reduced echelon pair with pivots
// (i, j); the free entries are the positions after i other than j in the
// first row and the positions after j in the second row.

const PIVOT_PAIRS: [(usize, usize); 15] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 5),
    (4, 5),
];

/// Enumerates lines of `PG(5,q)` (or of any 6-dimensional coordinate space)
/// by a dense index.
#[derive(Debug, Clone)]
pub struct LineIndexer {
    q: usize,
    offsets: [usize; 16],
    pair_slot: [[usize; 6]; 6],
}

impl LineIndexer {
    pub fn new(q: u32) -> Self {
        let q = q as usize;
        let mut offsets = [0usize; 16];
        let mut pair_slot = [[usize::MAX; 6]; 6];
        for (k, &(i, j)) in PIVOT_PAIRS.iter().enumerate() {
            offsets[k + 1] = offsets[k] + q.pow((9 - i - j) as u32);
            pair_slot[i][j] = k;
        }
        LineIndexer {
            q,
            offsets,
            pair_slot,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets[15]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the line whose echelon rows are `a`, `b`.
    pub fn index_of_rows(&self, a: &[FieldElem; 6], b: &[FieldElem; 6]) -> usize {
        let i = a.iter().position(|x| !x.is_zero()).expect("nonzero row");
        let j = b.iter().position(|x| !x.is_zero()).expect("nonzero row");
        let mut idx = 0usize;
        let mut scale = 1usize;
        for k in (i + 1..6).filter(|&k| k != j) {
            idx += a[k].code() as usize * scale;
            scale *= self.q;
        }
        for x in &b[j + 1..6] {
            idx += x.code() as usize * scale;
            scale *= self.q;
        }
        self.offsets[self.pair_slot[i][j]] + idx
    }

    pub fn rows_of_index(&self, idx: usize) -> ([FieldElem; 6], [FieldElem; 6]) {
        let k = self.offsets.partition_point(|&o| o <= idx) - 1;
        let (i, j) = PIVOT_PAIRS[k];
        let mut rest = idx - self.offsets[k];
        let mut a = [FieldElem::ZERO; 6];
        let mut b = [FieldElem::ZERO; 6];
        a[i] = FieldElem::ONE;
        b[j] = FieldElem::ONE;
        let mut next = || {
            let d = FieldElem::from_code((rest % self.q) as u8);
            rest /= self.q;
            d
        };
        for k in (i + 1..6).filter(|&k| k != j) {
            a[k] = next();
        }
        for x in b[j + 1..6].iter_mut() {
            *x = next();
        }
        (a, b)
    }

    pub fn index(&self, p: &Pencil) -> usize {
        self.index_of_rows(&p.a().0, &p.b().0)
    }

    pub fn pencil(&self, idx: usize) -> Pencil {
        let (a, b) = self.rows_of_index(idx);
        Pencil::from_key_unchecked(SymMat(a), SymMat(b))
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

/// Orbit partition of `n` points under the given maps, computed from the
/// images of every point under each generator.
fn partition(n: usize, images: impl Fn(usize) -> Vec<usize> + Sync) -> UnionFind {
    let all: Vec<Vec<usize>> = (0..n).into_par_iter().map(&images).collect();
    let mut uf = UnionFind::new(n);
    for (x, imgs) in all.into_iter().enumerate() {
        for y in imgs {
            uf.union(x, y);
        }
    }
    uf
}

/// Orbit partition of all lines of `PG(5,q)` under the congruence action.
pub struct OraclePartition {
    indexer: LineIndexer,
    uf: UnionFind,
    /// Root of each component, with the label of the canonical representative
    /// it contains (if any).
    labels: HashMap<usize, ClassLabel>,
    pub orbit_count: usize,
}

impl OraclePartition {
    pub fn new(f: &FieldSpec) -> Result<Self, OrbitError> {
        limit(f, MAX_ORACLE_Q)?;
        let indexer = LineIndexer::new(f.q());
        let gens = generators(f);
        let mut uf = partition(indexer.len(), |x| {
            let p = indexer.pencil(x);
            gens.iter().map(|g| indexer.index(&act(f, g, &p))).collect()
        });
        let mut roots = HashSet::new();
        for x in 0..indexer.len() {
            roots.insert(uf.find(x));
        }
        let mut labels = HashMap::new();
        for label in all_labels(f.is_odd()) {
            let rep = canonical_rep(label, f)?;
            let root = uf.find(indexer.index(&rep));
            if let Some(prev) = labels.insert(root, label) {
                return Err(OrbitError::CheckFailed {
                    name: "canonical representatives distinct".into(),
                    witness: format!("{prev} and {label} share an orbit"),
                });
            }
        }
        Ok(OraclePartition {
            indexer,
            uf,
            labels,
            orbit_count: roots.len(),
        })
    }

    pub fn label_of_index(&mut self, idx: usize) -> Option<ClassLabel> {
        let r = self.uf.find(idx);
        self.labels.get(&r).copied()
    }

    pub fn label_of(&mut self, p: &Pencil) -> Option<ClassLabel> {
        let idx = self.indexer.index(p);
        self.label_of_index(idx)
    }

    pub fn orbit_size(&mut self, p: &Pencil) -> usize {
        let idx = self.indexer.index(p);
        self.uf.component_size(idx)
    }

    pub fn indexer(&self) -> &LineIndexer {
        &self.indexer
    }

    /// Sizes of all orbits, ascending.
    pub fn orbit_sizes(&mut self) -> Vec<usize> {
        let mut seen = HashSet::new();
        let mut sizes = Vec::new();
        for x in 0..self.indexer.len() {
            let r = self.uf.find(x);
            if seen.insert(r) {
                sizes.push(self.uf.component_size(r));
            }
        }
        sizes.sort();
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    Classifier,
    Oracle,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelCensus {
    pub orbits: u32,
    pub lines: u128,
    pub expected: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TensorCensus {
    pub lines: u128,
    pub expected: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CensusReport {
    pub q: u32,
    pub mode: CensusMode,
    pub orbit_count: u32,
    pub per_label: BTreeMap<ClassLabel, LabelCensus>,
    pub per_tensor: BTreeMap<u8, TensorCensus>,
    pub total_lines: u128,
    pub expected_total: u128,
    pub consistent: bool,
}

fn build_report(
    f: &FieldSpec,
    mode: CensusMode,
    orbit_count: u32,
    lines: BTreeMap<ClassLabel, (u32, u128)>,
) -> CensusReport {
    let expected = expected_counts(f);
    let q = f.q();
    let mut per_label = BTreeMap::new();
    let mut per_tensor: BTreeMap<u8, TensorCensus> = TENSOR_ORBITS
        .iter()
        .map(|&t| {
            (
                t,
                TensorCensus {
                    lines: 0,
                    expected: tensor_orbit_total(t, q).unwrap(),
                },
            )
        })
        .collect();
    for label in all_labels(f.is_odd()) {
        let (orbits, n) = lines.get(&label).copied().unwrap_or((0, 0));
        per_label.insert(
            label,
            LabelCensus {
                orbits,
                lines: n,
                expected: expected.per_label[&label],
            },
        );
        per_tensor.get_mut(&label.tensor_orbit).unwrap().lines += n;
    }
    let total_lines = lines.values().map(|v| v.1).sum();
    let expected_total = line_count(q);
    let consistent = orbit_count == 15
        && total_lines == expected_total
        && per_label
            .values()
            .all(|c| c.orbits == 1 && c.lines == c.expected)
        && per_tensor.values().all(|c| c.lines == c.expected);
    CensusReport {
        q,
        mode,
        orbit_count,
        per_label,
        per_tensor,
        total_lines,
        expected_total,
        consistent,
    }
}

/// Labels every line with the classifier.
fn classifier_labels(f: &FieldSpec, indexer: &LineIndexer) -> Result<Vec<ClassLabel>, OrbitError> {
    let table = PointTable::new(f)?;
    (0..indexer.len())
        .into_par_iter()
        .map(|i| classify_with(&table, &indexer.pencil(i)).map_err(OrbitError::from))
        .collect()
}

fn classifier_counts(
    f: &FieldSpec,
    indexer: &LineIndexer,
) -> Result<BTreeMap<ClassLabel, u128>, OrbitError> {
    let table = PointTable::new(f)?;
    let labels = all_labels(f.is_odd());
    let counts = (0..indexer.len())
        .into_par_iter()
        .try_fold(
            || vec![0u128; labels.len()],
            |mut acc, i| {
                let l = classify_with(&table, &indexer.pencil(i))?;
                acc[labels.iter().position(|&x| x == l).unwrap()] += 1;
                Ok::<_, OrbitError>(acc)
            },
        )
        .try_reduce(
            || vec![0u128; labels.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(labels.into_iter().zip(counts).filter(|c| c.1 > 0).collect())
}

pub fn census(f: &FieldSpec, mode: CensusMode) -> Result<CensusReport, OrbitError> {
    match mode {
        CensusMode::Classifier => {
            limit(f, MAX_CLASSIFIER_Q)?;
            let indexer = LineIndexer::new(f.q());
            let counts = classifier_counts(f, &indexer)?;
            let lines: BTreeMap<_, _> = counts.into_iter().map(|(l, n)| (l, (1, n))).collect();
            Ok(build_report(f, mode, lines.len() as u32, lines))
        }
        CensusMode::Oracle | CensusMode::Both => {
            limit(f, MAX_ORACLE_Q)?;
            let mut oracle = OraclePartition::new(f)?;
            let n = oracle.indexer().len();
            let oracle_labels: Vec<Option<ClassLabel>> =
                (0..n).map(|i| oracle.label_of_index(i)).collect();
            if mode == CensusMode::Both {
                let indexer = oracle.indexer().clone();
                let classified = classifier_labels(f, &indexer)?;
                if let Some(i) = (0..n).find(|&i| oracle_labels[i] != Some(classified[i])) {
                    return Err(OrbitError::Mismatch {
                        witness: indexer.pencil(i),
                        classifier: classified[i],
                        oracle: oracle_labels[i]
                            .map_or("unmatched orbit".into(), |l| l.to_string()),
                    });
                }
            }
            let mut lines: BTreeMap<ClassLabel, (u32, u128)> = BTreeMap::new();
            for l in oracle_labels.iter().flatten() {
                let e = lines.entry(*l).or_insert((1, 0));
                e.1 += 1;
            }
            Ok(build_report(f, mode, oracle.orbit_count as u32, lines))
        }
    }
}

// Lines through rank-3 points.

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String, witness: Option<String>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
            witness: if passed { None } else { witness },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaReport {
    pub q: u32,
    pub points_checked: usize,
    pub checks: Vec<CheckOutcome>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The first failing check as an error.
    pub fn into_result(self) -> Result<LemmaReport, OrbitError> {
        match self.checks.iter().find(|c| !c.passed) {
            Some(c) => Err(OrbitError::CheckFailed {
                name: c.name.clone(),
                witness: c.witness.clone().unwrap_or_default(),
            }),
            None => Ok(self),
        }
    }
}

/// Expected numbers of lines through a rank-3 point with distribution
/// `[0, i, q+1-i]`, for `i = 0..=3`.
pub fn expected_rank3_line_counts(q: u32) -> [u64; 4] {
    let q = q as u64;
    let n0 = (q.pow(4) + q.pow(3) - q * q - q) / 3;
    let n1 = (q.pow(4) + q * q + 2 * q) / 2;
    let n2 = q.pow(3) - q;
    let n3 = (q.pow(3) - q) * (q - 2) / 6;
    [n0, n1, n2, n3]
}

/// Lines through `p`, one per point of the quotient space.
fn lines_through(f: &FieldSpec, p: &SymMat) -> Vec<Pencil> {
    let pivot = p.0.iter().position(|x| !x.is_zero()).expect("nonzero");
    let q = f.q();
    let mut out = Vec::new();
    for idx in 1..(q as usize).pow(6) {
        let m = SymMat::from_index(idx, q);
        if !m.0[pivot].is_zero() || m.0.iter().find(|x| !x.is_zero()) != Some(&FieldElem::ONE) {
            continue;
        }
        out.push(Pencil::new(f, *p, m).expect("independent"));
    }
    out
}

/// `N(P)`: rank-1 points `Q` such that the line `PQ` has no rank-2 point,
/// returned with their preimages in `PG(2,q)`.
fn nrc_points(info: &impl PointInfo, p: &SymMat) -> Vec<(ProjPoint2, SymMat)> {
    let f = info.field();
    ProjPoint2::all(f)
        .into_iter()
        .filter_map(|u| {
            let r = veronese(f, &u);
            let line = Pencil::new(f, *p, r).ok()?;
            (rank_distribution_with(info, &line).a2 == 0).then_some((u, r))
        })
        .collect()
}

fn dot(f: &FieldSpec, w: &[FieldElem; 6], y: &[FieldElem; 6]) -> FieldElem {
    w.iter()
        .zip(y)
        .fold(FieldElem::ZERO, |s, (&a, &b)| f.add(s, f.mul(a, b)))
}

/// `diag(1/2, 1/2, 1/2, 1, 1, 1) m` in the 6-coordinate order.
fn half_diagonal(f: &FieldSpec, m: &SymMat) -> [FieldElem; 6] {
    let h = f.half().expect("odd characteristic");
    let c = m.0;
    [
        f.mul(h, c[0]),
        f.mul(h, c[1]),
        f.mul(h, c[2]),
        c[3],
        c[4],
        c[5],
    ]
}

/// `pts` lie in the hyperplane `w . y = 0` and span it, or span as much of it
/// as their number allows (four points at `q = 3`).
fn spans_hyperplane(f: &FieldSpec, pts: &[SymMat], w: &[FieldElem; 6]) -> bool {
    let rows: Vec<Vec<FieldElem>> = pts.iter().map(|m| m.0.to_vec()).collect();
    w.iter().any(|x| !x.is_zero())
        && linalg::rank(f, &rows) == pts.len().min(5)
        && pts.iter().all(|m| dot(f, w, &m.0).is_zero())
}

fn collinear(f: &FieldSpec, pts: &[ProjPoint2]) -> bool {
    let rows: Vec<Vec<FieldElem>> = pts.iter().map(|u| u.coords().to_vec()).collect();
    linalg::rank(f, &rows) == 2
}

fn has_collinear_triple(f: &FieldSpec, pts: &[ProjPoint2]) -> bool {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                if collinear(f, &[pts[i], pts[j], pts[k]]) {
                    return true;
                }
            }
        }
    }
    false
}

/// Rank-3 points examined by [`lemma_checks`]: all of them when there are at
/// most 300, otherwise a fixed pseudo-random sample of 120.
pub fn lemma_sample(f: &FieldSpec, info: &impl PointInfo) -> Vec<SymMat> {
    let mut pts = Vec::new();
    crate::symspace::for_each_point(f, |m| {
        if info.rank(&m) == 3 {
            pts.push(m);
        }
    });
    if pts.len() > 300 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + f.q() as u64);
        pts.shuffle(&mut rng);
        pts.truncate(120);
        pts.sort();
    }
    pts
}

pub fn lemma_checks(f: &FieldSpec) -> Result<LemmaReport, OrbitError> {
    limit(f, MAX_LEMMA_Q)?;
    let q = f.q();
    let table = PointTable::new(f)?;
    let sample = lemma_sample(f, &table);
    let expected_n = expected_rank3_line_counts(q);

    struct PointResult {
        point: SymMat,
        dist_ok: bool,
        n_counts: [u64; 4],
        nrc: Vec<(ProjPoint2, SymMat)>,
        constant_lines: Vec<Pencil>,
    }

    let results: Vec<PointResult> = sample
        .par_iter()
        .map(|p| {
            let mut special = (0u64, 0u64);
            let mut n_counts = [0u64; 4];
            let mut constant_lines = Vec::new();
            for line in lines_through(f, p) {
                let d = rank_distribution_with(&table, &line);
                if d == RankDist::new(1, 1, q - 1) {
                    special.0 += 1;
                } else if d == RankDist::new(1, 0, q) {
                    special.1 += 1;
                } else if d.a1 == 0 {
                    n_counts[d.a2 as usize] += 1;
                    if d.a2 == 0 {
                        constant_lines.push(line);
                    }
                }
            }
            PointResult {
                point: *p,
                dist_ok: special == ((q * q) as u64, (q + 1) as u64),
                n_counts,
                nrc: nrc_points(&table, p),
                constant_lines,
            }
        })
        .collect();

    let mut checks = Vec::new();
    let first_bad = |pred: &dyn Fn(&PointResult) -> bool| {
        results
            .iter()
            .find(|r| !pred(r))
            .map(|r| format!("{:?}", r.point))
    };

    let bad = first_bad(&|r| r.dist_ok);
    checks.push(CheckOutcome::new(
        "rank3-point-lines",
        bad.is_none(),
        format!(
            "{} lines [1,1,{}] and {} lines [1,0,{}] through each of {} points",
            q * q,
            q - 1,
            q + 1,
            q,
            results.len()
        ),
        bad,
    ));

    let bad = first_bad(&|r| r.n_counts == expected_n);
    checks.push(CheckOutcome::new(
        "rank3-point-constant-profile",
        bad.is_none(),
        format!("lines [0,i,q+1-i] through each point: {expected_n:?}"),
        bad,
    ));
    if q == 2 {
        let zero = results.iter().all(|r| r.n_counts[3] == 0);
        checks.push(CheckOutcome::new(
            "n3-zero-at-q2",
            zero,
            "o14 special case: no line [0,3,0] passes through a rank-3 point".into(),
            first_bad(&|r| r.n_counts[3] == 0),
        ));
    }

    let nrc_ok = |r: &PointResult| {
        let pre: Vec<ProjPoint2> = r.nrc.iter().map(|x| x.0).collect();
        let imgs: Vec<Vec<FieldElem>> = r.nrc.iter().map(|x| x.1 .0.to_vec()).collect();
        if pre.len() != (q + 1) as usize {
            return false;
        }
        if f.is_odd() {
            !has_collinear_triple(f, &pre) && linalg::rank(f, &imgs) == pre.len().min(5)
        } else {
            collinear(f, &pre) && linalg::rank(f, &imgs) == 3
        }
    };
    let bad = first_bad(&nrc_ok);
    checks.push(CheckOutcome::new(
        "nrc",
        bad.is_none(),
        if f.is_odd() {
            format!(
                "N(P) is the image of a conic ({} points spanning a hyperplane)",
                q + 1
            )
        } else {
            format!(
                "N(P) is the image of a line ({} points spanning a plane)",
                q + 1
            )
        },
        bad,
    ));

    if f.is_odd() {
        let literal = |r: &PointResult| {
            let pts: Vec<SymMat> = r.nrc.iter().map(|x| x.1).collect();
            spans_hyperplane(f, &pts, &half_diagonal(f, &r.point))
        };
        let bad = first_bad(&literal);
        let failures = results.iter().filter(|r| !literal(r)).count();
        checks.push(CheckOutcome::new(
            "polarity",
            bad.is_none(),
            format!(
                "<N(P)> equals the hyperplane diag(1/2,1/2,1/2,1,1,1) P: {} of {} points agree",
                results.len() - failures,
                results.len()
            ),
            bad,
        ));
        let adjugate = |r: &PointResult| {
            let pts: Vec<SymMat> = r.nrc.iter().map(|x| x.1).collect();
            spans_hyperplane(f, &pts, &half_diagonal(f, &r.point.adjugate(f)))
        };
        let bad = first_bad(&adjugate);
        checks.push(CheckOutcome::new(
            "polarity-adjugate",
            bad.is_none(),
            "<N(P)> equals the hyperplane diag(1/2,1/2,1/2,1,1,1) adj(P)".into(),
            bad,
        ));
    }

    // N(P) and N(P') for distinct points of a constant rank-3 line.
    let mut cache: HashMap<SymMat, HashSet<SymMat>> = HashMap::new();
    let mut nrc_of = |m: &SymMat| -> HashSet<SymMat> {
        let key = m.normalized(f).unwrap();
        cache
            .entry(key)
            .or_insert_with(|| {
                nrc_points(&table, &key)
                    .into_iter()
                    .map(|x| x.1.normalized(f).unwrap())
                    .collect()
            })
            .clone()
    };
    let mut pair_witness = None;
    let mut lines_examined = 0;
    'outer: for r in &results {
        for line in r.constant_lines.iter().take(4) {
            lines_examined += 1;
            let pts = line.points(f);
            let sets: Vec<HashSet<SymMat>> = pts.iter().map(&mut nrc_of).collect();
            for i in 0..sets.len() {
                for j in i + 1..sets.len() {
                    if sets[i].intersection(&sets[j]).count() > 1 {
                        pair_witness = Some(format!("{:?} and {:?}", pts[i], pts[j]));
                        break 'outer;
                    }
                }
            }
        }
    }
    checks.push(CheckOutcome::new(
        "nrc-intersections",
        pair_witness.is_none(),
        format!("|N(P) ∩ N(P')| <= 1 on {lines_examined} constant rank-3 lines"),
        pair_witness,
    ));

    let indexer = LineIndexer::new(q);
    let constant: u128 = (0..indexer.len())
        .into_par_iter()
        .filter(|&i| rank_distribution_with(&table, &indexer.pencil(i)).a3 == q + 1)
        .count() as u128;
    let expected = group_order(q) / 3;
    checks.push(CheckOutcome::new(
        "constant-rank3-lines",
        constant == expected,
        format!("found {constant}, expected {expected}"),
        Some(format!("{constant}")),
    ));

    Ok(LemmaReport {
        q,
        points_checked: results.len(),
        checks,
    })
}

// Ternary forms under substitution.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FormRepresentative {
    pub label: ClassLabel,
    pub forms: (TernaryForm, TernaryForm),
    /// Position of the representative's orbit in the census, by least line
    /// index.
    pub orbit: u32,
    pub orbit_size: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FormCensusReport {
    pub q: u32,
    pub orbit_count: u32,
    pub orbit_sizes: Vec<u128>,
    pub representatives: Vec<FormRepresentative>,
    pub representatives_distinct: bool,
    /// Odd `q`: each representative's orbit has the size of the matching
    /// matrix class, and the orbit size multisets coincide.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_matrix_model: Option<bool>,
    /// Even `q`: each representative tuple, read directly as the entries
    /// `(m11,m22,m33,m12,m13,m23)` of a symmetric matrix, is classified as its
    /// own label.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_reading_matches: Option<bool>,
    pub consistent: bool,
}

fn substitute_line(f: &FieldSpec, d: &Mat3, indexer: &LineIndexer, idx: usize) -> usize {
    let (a, b) = indexer.rows_of_index(idx);
    let ga = TernaryForm(a).substitute(f, d);
    let gb = TernaryForm(b).substitute(f, d);
    let p = Pencil::new(f, SymMat(ga.0), SymMat(gb.0)).expect("substitution is invertible");
    indexer.index(&p)
}

fn form_line_index(f: &FieldSpec, indexer: &LineIndexer, g: &(TernaryForm, TernaryForm)) -> usize {
    indexer.index(&Pencil::new(f, SymMat(g.0 .0), SymMat(g.1 .0)).expect("independent forms"))
}

/// Orbits of pencils of ternary quadratic forms under linear substitution.
pub fn form_model_census(f: &FieldSpec) -> Result<FormCensusReport, OrbitError> {
    limit(f, MAX_ORACLE_Q)?;
    let q = f.q();
    let indexer = LineIndexer::new(q);
    let gens: Vec<Mat3> = generators(f).iter().map(|g| *g.matrix()).collect();
    let mut uf = partition(indexer.len(), |x| {
        gens.iter()
            .map(|d| substitute_line(f, d, &indexer, x))
            .collect()
    });
    let mut roots = BTreeMap::new();
    for x in 0..indexer.len() {
        let r = uf.find(x);
        *roots.entry(r).or_insert(0u128) += 1;
    }
    let mut first_index = Vec::new();
    let mut seen = HashSet::new();
    for x in 0..indexer.len() {
        let r = uf.find(x);
        if seen.insert(r) {
            first_index.push(r);
        }
    }
    let mut orbit_sizes: Vec<u128> = roots.values().copied().collect();
    orbit_sizes.sort();

    let mut representatives = Vec::new();
    let mut rep_roots = HashSet::new();
    for label in all_labels(f.is_odd()) {
        let forms = pencil_of_conics(label, f)?;
        let idx = form_line_index(f, &indexer, &forms);
        let root = uf.find(idx);
        rep_roots.insert(root);
        representatives.push(FormRepresentative {
            label,
            forms,
            orbit: first_index.iter().position(|&r| r == root).unwrap() as u32,
            orbit_size: roots[&root],
        });
    }
    let representatives_distinct = rep_roots.len() == representatives.len();

    let matches_matrix_model = if f.is_odd() {
        let mut oracle = OraclePartition::new(f)?;
        let mut matrix_sizes: Vec<u128> = oracle
            .orbit_sizes()
            .into_iter()
            .map(|s| s as u128)
            .collect();
        matrix_sizes.sort();
        let mut ok = matrix_sizes == orbit_sizes;
        for rep in &representatives {
            let m = Pencil::new(
                f,
                matrix_of_form(f, &rep.forms.0).expect("odd"),
                matrix_of_form(f, &rep.forms.1).expect("odd"),
            )
            .expect("independent");
            ok &= oracle.label_of(&m) == Some(rep.label);
            ok &= oracle.orbit_size(&m) as u128 == rep.orbit_size;
        }
        Some(ok)
    } else {
        None
    };

    let matrix_reading_matches = if f.is_odd() {
        None
    } else {
        let table = PointTable::new(f)?;
        let mut ok = true;
        for rep in &representatives {
            let p = Pencil::new(f, SymMat(rep.forms.0 .0), SymMat(rep.forms.1 .0))
                .expect("independent");
            ok &= classify_with(&table, &p)? == rep.label;
        }
        Some(ok)
    };

    let consistent = roots.len() == 15
        && representatives_distinct
        && orbit_sizes.iter().sum::<u128>() == line_count(q)
        && matches_matrix_model.unwrap_or(true);
    Ok(FormCensusReport {
        q,
        orbit_count: roots.len() as u32,
        orbit_sizes,
        representatives,
        representatives_distinct,
        matches_matrix_model,
        matrix_reading_matches,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, expected_stabilizer_order};
    use crate::pencil::Pencil;
    use proptest::prelude::*;
    use std::collections::VecDeque;

    fn field(q: u32) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    fn el(c: u8) -> FieldElem {
        FieldElem::from_code(c)
    }

    #[test]
    fn group_sizes() {
        assert_eq!(group_elements(&field(2)).unwrap().len(), 168);
        assert_eq!(group_elements(&field(3)).unwrap().len(), 5616);
        let g4 = group_elements(&field(4)).unwrap();
        assert_eq!(g4.len(), 60480);
        let distinct: HashSet<_> = g4.iter().collect();
        assert_eq!(distinct.len(), 60480);
        assert_eq!(
            group_elements(&field(8)),
            Err(OrbitError::FieldTooLarge { q: 8, limit: 7 })
        );
    }

    // Closure of the generators under multiplication.
    #[test]
    fn generators_generate_pgl3() {
        for q in [2, 3, 4, 5] {
            let f = field(q);
            let gens = generators(&f);
            let mut seen = HashSet::new();
            let mut queue = VecDeque::new();
            seen.insert(GroupElem::identity());
            queue.push_back(GroupElem::identity());
            while let Some(g) = queue.pop_front() {
                for s in &gens {
                    let h = s.compose(&f, &g);
                    if seen.insert(h) {
                        queue.push_back(h);
                    }
                }
            }
            assert_eq!(seen.len() as u128, group_order(q), "q={q}");
        }
    }

    #[test]
    fn act_examples() {
        let f = field(5);
        let o5 = canonical_rep("o5".parse().unwrap(), &f).unwrap();
        assert_eq!(act(&f, &GroupElem::identity(), &o5), o5);
        let o = el(0);
        let l = el(1);
        let swap = GroupElem::new(&f, [[o, l, o], [l, o, o], [o, o, l]]).unwrap();
        assert_eq!(act(&f, &swap, &o5), o5);

        // beta2 = 1, beta3 = 1, gamma3 = 2 over F_5
        let mid = Pencil::new(
            &f,
            SymMat::from_codes(&f, &[1, 0, 0, 0, 0, 0]).unwrap(),
            SymMat::from_codes(&f, &[0, 1, 2, 0, 0, 1]).unwrap(),
        )
        .unwrap();
        let shift = f.neg(f.div(l, el(2)).unwrap());
        let d = GroupElem::new(&f, [[l, o, o], [o, l, shift], [o, o, l]]).unwrap();
        let diag = Pencil::new(
            &f,
            SymMat::from_codes(&f, &[1, 0, 0, 0, 0, 0]).unwrap(),
            SymMat::from_codes(&f, &[0, 3, 2, 0, 0, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(act(&f, &d, &mid), diag);
    }

    #[test]
    fn line_indexer_is_a_bijection() {
        for q in [2, 3, 4] {
            let f = field(q);
            let ix = LineIndexer::new(q);
            assert_eq!(ix.len() as u128, line_count(q));
            for i in 0..ix.len() {
                let p = ix.pencil(i);
                assert_eq!(Pencil::new(&f, *p.a(), *p.b()).unwrap(), p);
                assert_eq!(ix.index(&p), i);
            }
        }
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(6);
        uf.union(0, 1);
        uf.union(2, 3);
        uf.union(1, 3);
        assert_eq!(uf.find(0), uf.find(2));
        assert_eq!(uf.component_size(3), 4);
        assert_ne!(uf.find(4), uf.find(5));
    }

    #[test]
    fn stabilizer_examples() {
        let f2 = field(2);
        let o17 = canonical_rep("o17".parse().unwrap(), &f2).unwrap();
        let r = stabilizer_order(&f2, &o17).unwrap();
        assert_eq!(r.order, 3);
        for g in &r.sample_elements {
            assert_eq!(act(&f2, g, &o17), o17);
        }
        let f3 = field(3);
        let o10 = canonical_rep("o10".parse().unwrap(), &f3).unwrap();
        assert_eq!(stabilizer_order(&f3, &o10).unwrap().order, 144);
        let o15 = canonical_rep("o15".parse().unwrap(), &f3).unwrap();
        assert_eq!(stabilizer_order(&f3, &o15).unwrap().order, 4);
        assert!(matches!(
            stabilizer_order(&field(7), &o17),
            Err(OrbitError::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_orbit_stabilizer_identity() {
        for q in [2, 3] {
            let f = field(q);
            let mut oracle = OraclePartition::new(&f).unwrap();
            assert_eq!(oracle.orbit_count, 15);
            for label in all_labels(f.is_odd()) {
                let rep = canonical_rep(label, &f).unwrap();
                let stab = stabilizer_order(&f, &rep).unwrap().order;
                assert_eq!(
                    oracle.orbit_size(&rep) as u128 * stab,
                    group_order(q),
                    "{label}"
                );
                assert_eq!(stab, expected_stabilizer_order(label, &f).unwrap());
            }
        }
    }

    #[test]
    fn census_q2_both() {
        let r = census(&field(2), CensusMode::Both).unwrap();
        assert!(r.consistent);
        assert_eq!(r.orbit_count, 15);
        let totals: Vec<u128> = r.per_tensor.values().map(|t| t.lines).collect();
        assert_eq!(totals, vec![21, 21, 112, 42, 7, 28, 168, 28, 84, 84, 56]);
        assert_eq!(r.total_lines, 651);
    }

    #[test]
    fn census_q3_classifier() {
        let r = census(&field(3), CensusMode::Classifier).unwrap();
        assert!(r.consistent);
        assert_eq!(r.per_tensor[&13].lines, 2808);
        assert_eq!(
            census(&field(16), CensusMode::Classifier),
            Err(OrbitError::FieldTooLarge { q: 16, limit: 9 })
        );
    }

    #[test]
    fn lemma_counts_formula() {
        assert_eq!(expected_rank3_line_counts(2)[3], 0);
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let n = expected_rank3_line_counts(q);
            let q64 = q as u64;
            let total: u64 = n.iter().sum::<u64>() + q64 * q64 + q64 + 1;
            assert_eq!(total, (q64.pow(5) - 1) / (q64 - 1));
        }
    }

    #[test]
    fn lemma_checks_q2_q3() {
        let r2 = lemma_checks(&field(2)).unwrap();
        for name in [
            "rank3-point-lines",
            "rank3-point-constant-profile",
            "n3-zero-at-q2",
            "nrc",
            "nrc-intersections",
            "constant-rank3-lines",
        ] {
            assert!(r2.check(name).unwrap().passed, "{name}");
        }
        let r3 = lemma_checks(&field(3)).unwrap();
        assert_eq!(r3.points_checked, 234);
        assert_eq!(
            r3.check("constant-rank3-lines").unwrap().detail,
            "found 1872, expected 1872"
        );
        assert!(r3.check("polarity-adjugate").unwrap().passed);
        assert!(r3.check("nrc").unwrap().passed);
    }

    // The hyperplane through N(P) follows adj(P), not P itself.
    #[test]
    fn polarity_witness_q5() {
        let f = field(5);
        let p = SymMat::diag(el(1), el(1), el(2));
        let table = PointTable::new(&f).unwrap();
        let n = nrc_points(&table, &p);
        let all_ones = SymMat([el(1); 6]);
        assert!(n.iter().any(|x| x.1 == all_ones));
        assert!(!dot(&f, &half_diagonal(&f, &p), &all_ones.0).is_zero());
        let pts: Vec<SymMat> = n.iter().map(|x| x.1).collect();
        assert!(spans_hyperplane(
            &f,
            &pts,
            &half_diagonal(&f, &p.adjugate(&f))
        ));
    }

    // In characteristic 2 a sum of squares is a square, so several of the
    // tabulated even-q pencils coincide under substitution.
    #[test]
    fn form_census_even() {
        for q in [2, 4] {
            let f = field(q);
            let r = form_model_census(&f).unwrap();
            assert_eq!(r.orbit_count, 15);
            assert_eq!(r.orbit_sizes.iter().sum::<u128>(), line_count(q));
            assert_eq!(r.matrix_reading_matches, Some(true));
            assert!(!r.representatives_distinct);
            assert!(!r.consistent);
            let size = |l: &str| {
                r.representatives
                    .iter()
                    .find(|x| x.label.to_string() == l)
                    .unwrap()
                    .orbit_size
            };
            assert_eq!(size("o5"), size("o8"));
            assert_eq!(size("o5"), size("o14"));
        }
        let r = form_model_census(&field(2)).unwrap();
        let o12x = r
            .representatives
            .iter()
            .find(|x| x.label.to_string() == "o12x")
            .unwrap();
        assert_eq!(o12x.forms.0.codes(), [0, 1, 0, 1, 0, 0]);
        assert_eq!(o12x.forms.1.codes(), [0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn form_census_q3_matches_matrices() {
        let r = form_model_census(&field(3)).unwrap();
        assert_eq!(r.orbit_count, 15);
        assert!(r.representatives_distinct);
        assert_eq!(r.matches_matrix_model, Some(true));
        assert!(r.consistent);
    }

    fn arb_group(q: u32) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0..q as u8, 18 + 12)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn action_composes((q, c) in prop::sample::select(vec![2u32, 3, 4, 5]).prop_flat_map(|q| (Just(q), arb_group(q)))) {
            let f = field(q);
            let m = |o: usize| -> Mat3 { std::array::from_fn(|i| std::array::from_fn(|j| el(c[o + 3 * i + j]))) };
            let (Some(d1), Some(d2)) = (GroupElem::new(&f, m(0)), GroupElem::new(&f, m(9))) else {
                return Ok(());
            };
            let s = |o: usize| SymMat(std::array::from_fn(|i| el(c[o + i])));
            let Ok(p) = Pencil::new(&f, s(18), s(24)) else { return Ok(()) };
            prop_assert_eq!(act(&f, &d1, &act(&f, &d2, &p)), act(&f, &d1.compose(&f, &d2), &p));
            prop_assert_eq!(classify(&act(&f, &d1, &p), &f), classify(&p, &f));
        }
    }
}
