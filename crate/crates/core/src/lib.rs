//! Block orthogonal polynomials.
//!
//! Given two positive measures, the standard block orthogonal polynomials
//! `P_{i;n}` are orthogonal to every polynomial of degree `< i` under the
//! first measure and mutually orthogonal under the second. They are built by
//! a two-step Gram–Schmidt procedure: the standard orthogonal polynomials `Q_n`
//! of the first measure, then a second orthogonalization of `Q_i, Q_{i+1}, ...`
//! under the second measure. Each construction can be cross-checked against
//! closed determinant formulas, integral representations and parity identities.
//!
//! All algorithms are generic over [`Scalar`]: exact [`Rational`] arithmetic is
//! the reference backend and `f64` is the fast one.

pub mod analysis;
pub mod block;
pub mod error;
pub mod gso;
pub mod matrix;
pub mod measures;
pub mod multiblock;
pub mod poly;
pub mod projectors;
pub mod quadrature;
pub mod scalar;
pub mod standard;
pub mod tolerances;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use measures::{GramMatrix, Interval, Measure, MomentSequence, Weight};
pub use poly::{Parity, Polynomial};
pub use scalar::{Rational, Scalar, ScalarKind};
