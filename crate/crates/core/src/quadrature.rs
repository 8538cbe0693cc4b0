//! Gauss rules from three-term recurrences and tensor-product grids.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::scalar::{Rational, Scalar};
use crate::standard::{build_standard, Normalization};
use crate::tolerances::EIGEN_TOL;

/// One-dimensional rule. Weights sum to 1: integrals come out in units of
/// the zeroth moment, like every other quantity in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Exact for polynomials up to this degree.
    pub fn exactness(&self) -> usize {
        (2 * self.len()).saturating_sub(1)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the monic
/// recurrence `p_{n+1} = (x + b_n) p_n - c_n p_{n-1}`, weights the squared
/// first components of the normalized eigenvectors. `b` holds `b_0..b_{n-1}`
/// and `c` holds `c_1..c_{n-1}` (all positive).
pub fn golub_welsch(b: &[f64], c: &[f64]) -> Result<GaussRule> {
    let n = b.len();
    if n == 0 {
        return Ok(GaussRule {
            nodes: Vec::new(),
            weights: Vec::new(),
        });
    }
    if c.len() + 1 != n {
        return Err(Error::Dimension(format!("{n} diagonal and {} off-diagonal terms", c.len())));
    }
    if let Some(k) = c.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NotPositiveDefinite {
            index: k + 1,
            pivot: c[k],
        });
    }
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = -b[k];
        if k + 1 < n {
            let off = c[k].sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::try_new(j, EIGEN_TOL, 0)
        .ok_or_else(|| Error::Moment("tridiagonal eigenproblem did not converge".into()))?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// `n`-point Gauss–Legendre on `[-1, 1]`, weights summing to 1.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    let b = vec![0.0; n];
    let c: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k * k / (4.0 * k * k - 1.0)
        })
        .collect();
    golub_welsch(&b, &c)
}

/// `n`-point Gauss rule of a measure, from the recurrence of its own monic
/// orthogonal polynomials. The recurrence is computed exactly when the
/// moments are rational and converted to `f64` only at the end.
pub fn gauss_rule(measure: &Measure, n: usize) -> Result<GaussRule> {
    if n == 0 {
        return golub_welsch(&[], &[]);
    }
    let (b, c) = if measure.has_rational_moments() {
        let basis = build_standard::<Rational>(measure, n + 1, Normalization::Monic)?;
        let rec = basis.recurrence();
        (
            rec.iter().take(n).map(|r| r.b.to_f64()).collect::<Vec<_>>(),
            rec.iter().skip(1).take(n - 1).map(|r| r.c.to_f64()).collect::<Vec<_>>(),
        )
    } else {
        let basis = build_standard::<f64>(measure, n + 1, Normalization::Monic)?;
        let rec = basis.recurrence();
        (
            rec.iter().take(n).map(|r| r.b).collect(),
            rec.iter().skip(1).take(n - 1).map(|r| r.c).collect(),
        )
    };
    golub_welsch(&b, &c)
}

/// Tensor product of one-dimensional rules.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub axes: Vec<GaussRule>,
    pub descriptor: String,
}

impl QuadratureGrid {
    pub fn new(axes: Vec<GaussRule>, descriptor: impl Into<String>) -> Self {
        Self {
            axes,
            descriptor: descriptor.into(),
        }
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    /// Smallest per-axis node count.
    pub fn min_nodes(&self) -> usize {
        self.axes.iter().map(GaussRule::len).min().unwrap_or(0)
    }

    /// Calls `f(y, w)` for every tensor node `y` with product weight `w`.
    pub fn for_each_node(&self, mut f: impl FnMut(&[f64], f64)) {
        let d = self.dims();
        if d == 0 {
            f(&[], 1.0);
            return;
        }
        if self.axes.iter().any(GaussRule::is_empty) {
            return;
        }
        let mut idx = vec![0usize; d];
        let mut point = vec![0.0; d];
        loop {
            let mut w = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                point[k] = self.axes[k].nodes[i];
                w *= self.axes[k].weights[i];
            }
            f(&point, w);
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < self.axes[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == d {
                    return;
                }
            }
        }
    }

    /// Sum of `w(y) f(y)` over every tensor node.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each_node(|y, w| acc += w * f(y));
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let r = gauss_legendre(4).unwrap();
        assert_eq!(r.exactness(), 7);
        // mean of x^6 over [-1, 1] is 1/7
        assert!((r.integrate(|x| x.powi(6)) - 1.0 / 7.0).abs() < 1e-14);
        assert!(r.integrate(|x| x.powi(5)).abs() < 1e-15);
    }

    #[test]
    fn measure_rules() {
        let g = Measure::gaussian(Rational::from_i64(1)).unwrap();
        let r = gauss_rule(&g, 3).unwrap();
        assert!((r.integrate(|x| x * x) - 0.5).abs() < 1e-14);
        assert!((r.integrate(|x| x.powi(4)) - 0.75).abs() < 1e-14);
        let l = Measure::gamma(Rational::from_i64(1), Rational::from_i64(1)).unwrap();
        let r = gauss_rule(&l, 3).unwrap();
        assert!((r.integrate(|x| x.powi(5)) - 120.0).abs() < 1e-10);
    }

    #[test]
    fn tensor_grid() {
        let r = gauss_legendre(2).unwrap();
        let grid = QuadratureGrid::new(vec![r.clone(), r], "legendre 2x2");
        let v = grid.integrate(|y| y[0] * y[0] * y[1] * y[1]);
        assert!((v - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_offdiagonal() {
        assert!(golub_welsch(&[0.0, 0.0], &[-1.0]).is_err());
    }
}
