//! Row reduction over `F_q` for small dense matrices.

use crate::gf::{FieldElem, FieldSpec};

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// columns. Zero rows are moved to the bottom.
pub fn rref(f: &FieldSpec, rows: &mut [Vec<FieldElem>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c];
                for j in 0..ncols {
                    let t = f.mul(factor, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &FieldSpec, rows: &[Vec<FieldElem>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// A basis of `{x : M x = 0}`.
pub fn nullspace(f: &FieldSpec, rows: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElem::ZERO; ncols];
        v[free] = FieldElem::ONE;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(m[i][free]);
        }
        basis.push(v);
    }
    basis
}

/// Scales `v` so that its first nonzero entry is 1. Returns `None` for the
/// zero vector.
pub fn normalize(f: &FieldSpec, v: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let lead = *v.iter().find(|x| !x.is_zero())?;
    let inv = f.inv(lead).ok()?;
    Some(v.iter().map(|&x| f.mul(x, inv)).collect())
}
