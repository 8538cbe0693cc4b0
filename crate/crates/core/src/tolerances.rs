//! Named numerical thresholds shared across the crate.

/// Relative residual accepted for float orthogonality and recurrence checks.
pub const FLOAT_RESIDUAL: f64 = 1e-10;

/// Relative agreement required between two float construction routes.
pub const FLOAT_ORACLE: f64 = 1e-9;

/// Gram–Schmidt pivot floor, relative to the diagonal Gram entry of the same vector.
pub const GS_PIVOT: f64 = 1e-13;

/// Eigenvalue tolerance for the tridiagonal Gauss-rule solver.
pub const EIGEN_TOL: f64 = 1e-13;

/// Relative stability required when the quadrature node count is doubled.
pub const QUADRATURE_STABILITY: f64 = 1e-12;

/// Bisection bracket width for float zero isolation.
pub const BRACKET_WIDTH: f64 = 1e-12;

/// Largest N accepted by float Hankel pipelines.
pub const FLOAT_MAX_N: usize = 20;

/// Relative singular-value gap for float rank decisions.
pub const SVD_GAP: f64 = 1e-10;

