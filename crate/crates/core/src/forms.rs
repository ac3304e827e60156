//! Ternary quadratic forms and their pencils under linear substitution.
//!
//! A form is stored by its coefficients on `(X^2, Y^2, Z^2, XY, XZ, YZ)`.
//! The group acts by `g(x) = f(D^T x)`, which matches the congruence action
//! `M -> D M D^T` under `f(x) = x^T M x`.

use serde::{Deserialize, Serialize};

use crate::gf::{FieldElem, FieldSpec};
use crate::symspace::{Mat3, SymMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TernaryForm(pub [FieldElem; 6]);

const MONOMIALS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

impl TernaryForm {
    pub fn codes(&self) -> [u32; 6] {
        self.0.map(|x| x.code() as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn eval(&self, f: &FieldSpec, x: &[FieldElem; 3]) -> FieldElem {
        MONOMIALS
            .iter()
            .zip(self.0)
            .fold(FieldElem::ZERO, |acc, (&(i, j), c)| {
                f.add(acc, f.mul(c, f.mul(x[i], x[j])))
            })
    }

    /// `g(x) = f(D^T x)`, with coefficients recovered by polarization.
    pub fn substitute(&self, f: &FieldSpec, d: &Mat3) -> TernaryForm {
        let g = |x: [FieldElem; 3]| {
            let mut y = [FieldElem::ZERO; 3];
            for (j, yj) in y.iter_mut().enumerate() {
                for (i, &xi) in x.iter().enumerate() {
                    *yj = f.add(*yj, f.mul(d[i][j], xi));
                }
            }
            self.eval(f, &y)
        };
        let e = |i: usize| {
            let mut v = [FieldElem::ZERO; 3];
            v[i] = FieldElem::ONE;
            v
        };
        let sq: [FieldElem; 3] = std::array::from_fn(|i| g(e(i)));
        let cross = |i: usize, j: usize| {
            let mut v = e(i);
            v[j] = FieldElem::ONE;
            f.sub(f.sub(g(v), sq[i]), sq[j])
        };
        TernaryForm([sq[0], sq[1], sq[2], cross(0, 1), cross(0, 2), cross(1, 2)])
    }
}

/// The symmetric matrix with `x^T M x = g(x)`, halving the cross terms.
/// Exists only in odd characteristic.
pub fn matrix_of_form(f: &FieldSpec, g: &TernaryForm) -> Option<SymMat> {
    let h = f.half()?;
    let c = g.0;
    Some(SymMat([
        c[0],
        c[1],
        c[2],
        f.mul(h, c[3]),
        f.mul(h, c[4]),
        f.mul(h, c[5]),
    ]))
}

/// `x -> x^T M x`.
pub fn form_of_matrix(f: &FieldSpec, m: &SymMat) -> TernaryForm {
    let c = m.0;
    let two = |x: FieldElem| f.add(x, x);
    TernaryForm([c[0], c[1], c[2], two(c[3]), two(c[4]), two(c[5])])
}
