//! Independent checks of built SBO bases: multidimensional integral
//! representations evaluated by tensor Gauss quadrature, and real zero counts.

use serde::Serialize;
use serde_json::Value;

use crate::block::SboBasis;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::hankel_matrix;
use crate::poly::{sign_changes_in, to_float, Polynomial};
use crate::quadrature::{gauss_rule, GaussRule, QuadratureGrid};
use crate::scalar::Scalar;
use crate::tolerances::FLOAT_RESIDUAL;

/// Largest number of integration variables for the norm representation.
pub const Z_DIMENSION_CAP: usize = 3;
/// Largest constraint index and excess degree for the polynomial one.
pub const P_INDEX_CAP: usize = 2;
pub const P_EXCESS_CAP: usize = 3;
/// Grid resolution used for sign-change counting.
pub const ZERO_RESOLUTION: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub check: String,
    pub i: usize,
    pub n: usize,
    pub lhs: Value,
    pub rhs: Value,
    pub rel_err: f64,
    pub pass: bool,
}

impl IntegralCheck {
    fn scalar(check: &str, i: usize, n: usize, lhs: f64, rhs: f64) -> Self {
        let rel_err = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        Self {
            check: check.into(),
            i,
            n,
            lhs: lhs.into(),
            rhs: rhs.into(),
            rel_err,
            pass: rel_err <= FLOAT_RESIDUAL,
        }
    }

    fn poly(check: &str, i: usize, n: usize, lhs: &[f64], rhs: &[f64]) -> Self {
        let scale = rhs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let err = lhs
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let rel_err = err / scale.max(f64::MIN_POSITIVE);
        Self {
            check: check.into(),
            i,
            n,
            lhs: lhs.to_vec().into(),
            rhs: rhs.to_vec().into(),
            rel_err,
            pass: lhs.len() == rhs.len() && rel_err <= FLOAT_RESIDUAL,
        }
    }
}

fn require_nodes(grid: &QuadratureGrid, need: usize) -> Result<()> {
    let have = grid.min_nodes();
    if have < need {
        return Err(Error::InsufficientNodes { have, need });
    }
    Ok(())
}

fn eval_f(p: &Polynomial<f64>, x: f64) -> f64 {
    p.eval(&x)
}

/// `prod_{j<k} (y_k - y_j)`.
fn vandermonde(y: &[f64]) -> f64 {
    let mut v = 1.0;
    for k in 0..y.len() {
        for j in 0..k {
            v *= y[k] - y[j];
        }
    }
    v
}

/// Coefficients (ascending in `x`) of `prod_j (x - y_j)`.
fn monic_from_roots(y: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in y {
        let mut next = vec![0.0; c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= r * ck;
        }
        c = next;
    }
    c
}

/// Grid of `n - i + 1` copies of the second measure's Gauss rule with
/// `n + 1` nodes, exact for `det[Q_k(y_j)]^2`.
pub fn z_integral_grid<T: Scalar>(sbo: &SboBasis<T>, n: usize) -> Result<QuadratureGrid> {
    let dims = (n + 1).saturating_sub(sbo.i);
    if dims > Z_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dims,
            cap: Z_DIMENSION_CAP,
        });
    }
    let rule = gauss_rule(&sbo.measure2, n + 1)?;
    Ok(QuadratureGrid::new(
        vec![rule; dims],
        format!("{dims}-dim Gauss, {} nodes per axis", n + 1),
    ))
}

/// `Z_{i;n} (n+1-i)! = int dmu_2^{n+1-i} det[Q_k(y_j)]^2_{j,k=i..n}`,
/// compared with the determinant of the leading `gamma` block.
pub fn verify_z_integral<T: Scalar>(
    sbo: &SboBasis<T>,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<IntegralCheck> {
    let i = sbo.i;
    if n < i || n >= sbo.n_total {
        return Err(Error::IndexOutOfRange(format!("Z_{{{i};{n}}}")));
    }
    let dims = n + 1 - i;
    if dims > Z_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dims,
            cap: Z_DIMENSION_CAP,
        });
    }
    if grid.dims() != dims {
        return Err(Error::Dimension(format!("grid has {} axes, need {dims}", grid.dims())));
    }
    require_nodes(grid, n + 1)?;
    let q: Vec<Polynomial<f64>> = sbo.q_basis.polys[i..=n].iter().map(to_float).collect();
    let integral = grid.integrate(|y| {
        let m = Matrix::from_fn(dims, dims, |j, k| eval_f(&q[k], y[j]));
        let d = m.det();
        d * d
    });
    let lhs = integral / factorial(dims);
    let rhs = sbo.z_at(n as isize)?.to_f64();
    Ok(IntegralCheck::scalar("z_integral", i, n, lhs, rhs))
}

/// `det[c_{2;j+k}]_{j,k=0..n} (n+1)! = int dmu_2^{n+1} Delta_{n+1}(y)^2` and
/// `Z_{0;n} = (prod k_j)^2 det[c_{2;j+k}]`. Only for `i = 0`.
pub fn verify_hankel_integral<T: Scalar>(
    sbo: &SboBasis<T>,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<Vec<IntegralCheck>> {
    if sbo.i != 0 {
        return Err(Error::IndexOutOfRange("the Hankel form needs i = 0".into()));
    }
    let dims = n + 1;
    if dims > Z_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dims,
            cap: Z_DIMENSION_CAP,
        });
    }
    require_nodes(grid, n + 1)?;
    let hankel = hankel_matrix(&sbo.moments2, n + 1)?.entries.det();
    let integral = grid.integrate(|y| vandermonde(y).powi(2)) / factorial(dims);
    let kprod = (0..=n).fold(T::one(), |acc, j| acc * sbo.q_basis.k[j].clone());
    let scaled = kprod.clone() * kprod * hankel.clone();
    Ok(vec![
        IntegralCheck::scalar("hankel_integral", 0, n, integral, hankel.to_f64()),
        IntegralCheck::scalar("z_hankel", 0, n, scaled.to_f64(), sbo.z_at(n as isize)?.to_f64()),
    ])
}

/// First `i` axes from the first measure, the other `n - i` from the second,
/// each with `n` nodes.
pub fn p_integral_grid<T: Scalar>(sbo: &SboBasis<T>, n: usize) -> Result<QuadratureGrid> {
    check_p_caps(sbo.i, n)?;
    let r1 = gauss_rule(&sbo.q_basis.measure, n)?;
    let r2 = gauss_rule(&sbo.measure2, n)?;
    let mut axes: Vec<GaussRule> = vec![r1; sbo.i];
    axes.extend(std::iter::repeat_n(r2, n - sbo.i));
    Ok(QuadratureGrid::new(
        axes,
        format!("{} first-measure and {} second-measure axes, {n} nodes each", sbo.i, n - sbo.i),
    ))
}

fn check_p_caps(i: usize, n: usize) -> Result<()> {
    if i > P_INDEX_CAP {
        return Err(Error::DimensionCap {
            dims: i,
            cap: P_INDEX_CAP,
        });
    }
    if n > i + P_EXCESS_CAP {
        return Err(Error::DimensionCap {
            dims: n,
            cap: i + P_EXCESS_CAP,
        });
    }
    Ok(())
}

/// Integrates `Delta_{n+1}(y, x) prod_j Q_j(y_j)` coefficient by coefficient
/// in `x` and applies the prefactor `prod_{j<n} k_j / (Z_{i;n-1} prod_{j<i} h_j)`.
/// The result is compared with the built monic `P_{i;n}`.
pub fn verify_p_integral<T: Scalar>(
    sbo: &SboBasis<T>,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<IntegralCheck> {
    let i = sbo.i;
    if n < i || n >= sbo.n_total {
        return Err(Error::IndexOutOfRange(format!("P_{{{i};{n}}}")));
    }
    check_p_caps(i, n)?;
    if grid.dims() != n {
        return Err(Error::Dimension(format!("grid has {} axes, need {n}", grid.dims())));
    }
    require_nodes(grid, n)?;
    let q: Vec<Polynomial<f64>> = sbo.q_basis.polys[..n].iter().map(to_float).collect();
    let mut acc = vec![0.0; n + 1];
    grid.for_each_node(|y, w| {
        let f = vandermonde(y) * y.iter().zip(&q).map(|(&yj, qj)| eval_f(qj, yj)).product::<f64>();
        for (a, c) in acc.iter_mut().zip(monic_from_roots(y)) {
            *a += w * f * c;
        }
    });
    let s = &sbo.q_basis;
    let kprod = (0..n).fold(T::one(), |a, j| a * s.k[j].clone());
    let hprod = (0..i).fold(T::one(), |a, j| a * s.h[j].clone());
    let z_prev = sbo.z_at(n as isize - 1)?.clone();
    let pref = (kprod / (z_prev * hprod)).to_f64();
    let lhs: Vec<f64> = acc.iter().map(|a| a * pref).collect();
    let rhs = to_float(sbo.monic(n)?).padded(n + 1);
    Ok(IntegralCheck::poly("p_integral", i, n, &lhs, &rhs))
}

/// The symmetrized form for `i = 0`:
/// `Phat_{0;n} = 1 / (n! det[c_{2;j+k}]_{j,k<n}) int Delta_n(y)^2 prod (x - y_j)`.
pub fn verify_p_symmetrized<T: Scalar>(
    sbo: &SboBasis<T>,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<IntegralCheck> {
    if sbo.i != 0 {
        return Err(Error::IndexOutOfRange("the symmetrized form needs i = 0".into()));
    }
    check_p_caps(0, n)?;
    require_nodes(grid, n)?;
    let mut acc = vec![0.0; n + 1];
    grid.for_each_node(|y, w| {
        let f = vandermonde(y).powi(2);
        for (a, c) in acc.iter_mut().zip(monic_from_roots(y)) {
            *a += w * f * c;
        }
    });
    let hankel = hankel_matrix(&sbo.moments2, n)?.entries.det().to_f64();
    let lhs: Vec<f64> = acc.iter().map(|a| a / (factorial(n) * hankel)).collect();
    let rhs = to_float(sbo.monic(n)?).padded(n + 1);
    Ok(IntegralCheck::poly("p_symmetrized", 0, n, &lhs, &rhs))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub i: usize,
    pub n: usize,
    pub count: usize,
    pub brackets: Vec<(f64, f64)>,
    pub satisfies_theorem: bool,
}

/// Sign changes of `P_{i;n}` in the first measure's domain. At least `i`
/// are guaranteed, and exactly `n` when `i = n - 1`.
pub fn zero_report<T: Scalar>(sbo: &SboBasis<T>, n: usize) -> Result<ZeroReport> {
    let p = sbo.poly(n)?;
    let domain = sbo.q_basis.measure.domain();
    let sc = sign_changes_in(p, &domain, ZERO_RESOLUTION);
    let i = sbo.i;
    let satisfies_theorem = sc.count >= i && (i + 1 != n || sc.count == n);
    Ok(ZeroReport {
        i,
        n,
        count: sc.count,
        brackets: sc
            .brackets
            .iter()
            .map(|b| (b.lo.to_f64(), b.hi.to_f64()))
            .collect(),
        satisfies_theorem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::build_sbo;
    use crate::measures::Measure;
    use crate::scalar::Rational;
    use crate::standard::Normalization;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn hermite_pair() -> (Measure, Measure) {
        (
            Measure::gaussian(q(1, 1)).unwrap(),
            Measure::gaussian(q(2, 1)).unwrap(),
        )
    }

    fn sbo(i: usize) -> SboBasis<Rational> {
        let (m1, m2) = hermite_pair();
        build_sbo(&m1, &m2, i, 6, Normalization::Monic).unwrap()
    }

    #[test]
    fn z_integrals() {
        for (i, n) in [(2, 2), (2, 3), (0, 2), (1, 3)] {
            let b = sbo(i);
            let g = z_integral_grid(&b, n).unwrap();
            let c = verify_z_integral(&b, n, &g).unwrap();
            assert!(c.pass, "{c:?}");
        }
        let b = sbo(0);
        let g = z_integral_grid(&b, 2).unwrap();
        for c in verify_hankel_integral(&b, 2, &g).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn p_integrals() {
        for (i, n) in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)] {
            let b = sbo(i);
            let g = p_integral_grid(&b, n).unwrap();
            let c = verify_p_integral(&b, n, &g).unwrap();
            assert!(c.pass, "{c:?}");
        }
        // x^3 - 3/2 x
        let b = sbo(2);
        let c = verify_p_integral(&b, 3, &p_integral_grid(&b, 3).unwrap()).unwrap();
        assert_eq!(c.rhs, serde_json::json!([0.0, -1.5, 0.0, 1.0]));
        let b = sbo(0);
        let c = verify_p_symmetrized(&b, 2, &p_integral_grid(&b, 2).unwrap()).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn caps_and_node_counts() {
        let b = sbo(0);
        assert!(matches!(z_integral_grid(&b, 3), Err(Error::DimensionCap { .. })));
        assert!(matches!(p_integral_grid(&b, 4), Err(Error::DimensionCap { .. })));
        let small = QuadratureGrid::new(vec![gauss_rule(&b.measure2, 1).unwrap(); 2], "too small");
        assert!(matches!(
            verify_z_integral(&sbo(1), 2, &small),
            Err(Error::InsufficientNodes { have: 1, need: 3 })
        ));
    }

    #[test]
    fn zeros() {
        let b = sbo(2);
        let r = zero_report(&b, 4).unwrap();
        assert_eq!(r.count, 4);
        assert!(r.satisfies_theorem);
        let l1 = Measure::gamma(q(1, 1), q(1, 1)).unwrap();
        let l2 = Measure::gamma(q(2, 1), q(1, 1)).unwrap();
        let l = build_sbo::<Rational>(&l1, &l2, 1, 3, Normalization::Monic).unwrap();
        let r = zero_report(&l, 2).unwrap();
        assert_eq!(r.count, 2);
        assert!(r.brackets.iter().all(|b| b.0 >= 0.0));
    }
}
