//! Pencils of conics in `PG(2,q)`, equivalently lines of `PG(5,q)` relative
//! to the quadric Veronesean, classified under `PGL(3,q)`.
//!
//! * [`gf`] finite field arithmetic for `q <= 128`
//! * [`symspace`] symmetric 3x3 matrices as points of `PG(5,q)`, ranks and
//!   point classes
//! * [`pencil`] lines of `PG(5,q)`, their rank distributions and the
//!   determinant cubic
//! * [`classify`] the decision procedure, canonical representatives and
//!   expected stabiliser orders
//! * [`orbits`] brute-force orbit and stabiliser computations
//! * [`forms`] the ternary-quadratic-form model
//! * [`cli`] command line front end

#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod cli;
pub mod forms;
pub mod gf;
pub mod linalg;
pub mod orbits;
pub mod pencil;
pub mod symspace;

pub use classify::{classify, ClassLabel};
pub use gf::{FieldElem, FieldSpec};
pub use pencil::Pencil;
pub use symspace::SymMat;
