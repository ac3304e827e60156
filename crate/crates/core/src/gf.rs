//! Exact arithmetic in finite fields `F_q`, `q = p^e <= 128`.
//!
//! Elements are integer codes in `[0, q)` holding the base-`p` digits of a
//! polynomial residue modulo a fixed monic irreducible of degree `e`
//! (little-endian, so code 0 is zero and code 1 is one). All four operations
//! are served from precomputed tables built once per field.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order the tables are built for.
pub const MAX_ORDER: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("F_{0} has no non-squares")]
    NoNonsquare(u32),
    #[error("element code {code} out of range for F_{q}")]
    BadCode { code: u32, q: u32 },
}

/// An element of some `F_q`, identified by its code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Wraps a raw code without range checking; see [`FieldSpec::elem`].
    #[inline]
    pub const fn from_code(code: u8) -> Self {
        FieldElem(code)
    }

    #[inline]
    pub const fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// The field `F_q` together with its operation tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    square: Vec<bool>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`.
pub fn factor_prime_power(q: u32) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p, e))
}

// Dense polynomials over F_p, little-endian coefficient vectors.

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for i in 0..=dm {
            let idx = dr - dm + i;
            r[idx] = (r[idx] + p * p - c * m[i] % p) % p;
        }
        poly_trim(&mut r);
        if r.len() - 1 < dm {
            break;
        }
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    (1..p)
        .find(|x| a * x % p == 1)
        .expect("nonzero residue mod prime")
}

fn digits(code: u32, p: u32, len: usize) -> Vec<u32> {
    let mut c = code;
    (0..len)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn has_root(m: &[u32], p: u32) -> bool {
    (0..p).any(|x| m.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0)
}

/// Monic, degree `e`, rootless over `F_p`, and for `e >= 4` not divisible by
/// any monic polynomial of degree `2..=e/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let e = m.len() - 1;
    if e == 0 || m[e] != 1 {
        return false;
    }
    if e == 1 {
        return true;
    }
    if has_root(m, p) {
        return false;
    }
    if e >= 4 {
        for d in 2..=e / 2 {
            let count = p.pow(d as u32);
            for low in 0..count {
                let mut f = digits(low, p, d);
                f.push(1);
                let r = poly_rem(m, &f, p);
                if r.iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
    }
    true
}

impl FieldSpec {
    /// Builds `F_{p^e}` with the smallest monic irreducible modulus, where
    /// polynomials are compared by their code `sum c_i p^i`.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::InvalidModulus(
                "extension degree must be >= 1".into(),
            ));
        }
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q > MAX_ORDER as u64 {
            return Err(FieldError::OrderTooLarge(q));
        }
        let q = q as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|low| {
                    let mut m = digits(low, p, e as usize);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible(m, p))
                .expect("irreducible polynomials exist in every degree")
        };
        Ok(Self::build(p, e, q, modulus))
    }

    /// Builds `F_q` from its order, factoring `q = p^e`.
    pub fn from_order(q: u32) -> Result<Self, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(q as u64));
        }
        let (p, e) = factor_prime_power(q)?;
        Self::new(p, e)
    }

    /// Builds `F_q` with an explicit modulus given as `e + 1` little-endian
    /// digits. Ignored (after validation of its degree) when `e = 1`.
    pub fn with_modulus(q: u32, modulus: &[u32]) -> Result<Self, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(q as u64));
        }
        let (p, e) = factor_prime_power(q)?;
        if modulus.len() != e as usize + 1 {
            return Err(FieldError::InvalidModulus(format!(
                "expected {} digits for degree {e}, got {}",
                e + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&d| d >= p) {
            return Err(FieldError::InvalidModulus(format!(
                "digits must lie in [0, {p})"
            )));
        }
        if e == 1 {
            return Self::new(p, 1);
        }
        if !is_irreducible(modulus, p) {
            return Err(FieldError::InvalidModulus(format!(
                "{modulus:?} is not a monic irreducible of degree {e} over F_{p}"
            )));
        }
        Ok(Self::build(p, e, q, modulus.to_vec()))
    }

    fn build(p: u32, e: u32, q: u32, modulus: Vec<u32>) -> Self {
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..q {
            let da = digits(a, p, e as usize);
            for b in 0..q {
                let db = digits(b, p, e as usize);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum, p) as u8;
                let prod = if e == 1 {
                    vec![a * b % p]
                } else {
                    let mut prod = vec![0u32; 2 * e as usize - 1];
                    for (i, x) in da.iter().enumerate() {
                        for (j, y) in db.iter().enumerate() {
                            prod[i + j] = (prod[i + j] + x * y) % p;
                        }
                    }
                    let mut r = poly_rem(&prod, &modulus, p);
                    r.resize(e as usize, 0);
                    r
                };
                mul[(a * q + b) as usize] = undigits(&prod, p) as u8;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap() as u8)
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() as u8
                }
            })
            .collect();
        let mut field = FieldSpec {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            square: Vec::new(),
        };
        field.square = (0..q)
            .map(|a| {
                if p == 2 {
                    true
                } else {
                    let r = field.pow(FieldElem(a as u8), ((q - 1) / 2) as u64);
                    r.is_zero() || r == FieldElem::ONE
                }
            })
            .collect();
        field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// Modulus digits, little-endian, leading digit 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elem(&self, code: u32) -> Result<FieldElem, FieldError> {
        if code < self.q {
            Ok(FieldElem(code as u8))
        } else {
            Err(FieldError::BadCode { code, q: self.q })
        }
    }

    /// All elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.q).map(|c| FieldElem(c as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (1..self.q).map(|c| FieldElem(c as u8))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(FieldElem(self.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn arith(&self, a: FieldElem, b: FieldElem, op: ArithOp) -> Result<FieldElem, FieldError> {
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    pub fn pow(&self, a: FieldElem, mut n: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// The image of an integer under `Z -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let r = n.rem_euclid(self.p as i64) as u8;
        FieldElem(r)
    }

    /// `true` iff `a = x^2` for some `x`. Every element is a square in even
    /// characteristic; `is_square(0)` is `true`.
    #[inline]
    pub fn is_square(&self, a: FieldElem) -> bool {
        self.square[a.0 as usize]
    }

    /// Smallest code that is not a square.
    pub fn find_nonsquare(&self) -> Result<FieldElem, FieldError> {
        self.elements()
            .find(|&a| !self.is_square(a))
            .ok_or(FieldError::NoNonsquare(self.q))
    }

    /// A square root of `a`, if one exists (smallest code).
    pub fn sqrt(&self, a: FieldElem) -> Option<FieldElem> {
        self.elements().find(|&x| self.mul(x, x) == a)
    }

    /// Smallest code generating the multiplicative group.
    pub fn primitive_element(&self) -> FieldElem {
        let order = (self.q - 1) as u64;
        self.nonzero_elements()
            .find(|&a| {
                let mut x = a;
                for k in 1..order {
                    if x == FieldElem::ONE {
                        return k == order;
                    }
                    x = self.mul(x, a);
                }
                x == FieldElem::ONE
            })
            .expect("F_q^* is cyclic")
    }

    /// `1/2` in odd characteristic.
    pub fn half(&self) -> Option<FieldElem> {
        self.inv(self.from_int(2)).ok()
    }
}

/// Free-function form of [`FieldSpec::new`].
pub fn make_field(p: u32, e: u32) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(p, e)
}

pub fn is_square(a: FieldElem, f: &FieldSpec) -> bool {
    f.is_square(a)
}

pub fn find_nonsquare(f: &FieldSpec) -> Result<FieldElem, FieldError> {
    f.find_nonsquare()
}
