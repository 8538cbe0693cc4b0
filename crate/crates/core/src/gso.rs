//! Gram–Schmidt orthogonalization over an abstract Gram matrix, and the
//! determinant formulas that reproduce its output.
//!
//! Indices are zero-based: the input basis is `e_0..e_{N-1}` and `Z[n]` is the
//! determinant of the leading `n x n` block, so `Z[0] = 1`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::GramMatrix;
use crate::scalar::Scalar;
use crate::tolerances::GS_PIVOT;

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalizationResult<T> {
    /// Upper triangular; column `n` holds the coefficients of `E_n` on `e_0..e_n`.
    pub a: Matrix<T>,
    /// Inverse of `a`: `e_n = sum_m E_m b[m][n]`.
    pub b: Matrix<T>,
    /// `h_n = (E_n, E_n)`.
    pub h: Vec<T>,
    /// The prescribed `b_{n,n}`.
    pub b_diag: Vec<T>,
    /// `Z[0..=N]`.
    pub z: Vec<T>,
}

impl<T: Scalar> OrthogonalizationResult<T> {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn vector(&self, n: usize) -> Vec<T> {
        (0..=n).map(|m| self.a[(m, n)].clone()).collect()
    }
}

fn check_factors<T: Scalar>(factors: &[T], n: usize) -> Result<()> {
    if factors.len() < n {
        return Err(Error::Dimension(format!(
            "{} leading factors for {n} vectors",
            factors.len()
        )));
    }
    for (index, f) in factors.iter().take(n).enumerate() {
        if f.is_zero() || !f.is_finite() {
            return Err(Error::BadFactor { index });
        }
    }
    Ok(())
}

fn bilinear<T: Scalar>(g: &Matrix<T>, u: &[T], v: &[T]) -> T {
    let mut acc = T::zero();
    for (j, uj) in u.iter().enumerate() {
        if uj.is_zero() {
            continue;
        }
        let mut row = T::zero();
        for (k, vk) in v.iter().enumerate() {
            if !vk.is_zero() {
                row = row + g[(j, k)].clone() * vk.clone();
            }
        }
        acc = acc + uj.clone() * row;
    }
    acc
}

/// Orthogonalizes `e_0..e_{N-1}` with `b_{n,n} = leading_factors[n]`.
///
/// The exact backend runs the classical recurrence; the float backend the
/// modified one, re-projecting the running residual against each finished
/// vector. A residual norm at or below `GS_PIVOT * |g_nn|` (float) or `<= 0`
/// (exact) is reported as `NotPositiveDefinite`.
pub fn gram_schmidt<T: Scalar>(
    gram: &GramMatrix<T>,
    leading_factors: &[T],
) -> Result<OrthogonalizationResult<T>> {
    let g = &gram.entries;
    let n_vec = g.rows();
    check_factors(leading_factors, n_vec)?;
    // columns of E, each padded to length N
    let mut e: Vec<Vec<T>> = Vec::with_capacity(n_vec);
    let mut h: Vec<T> = Vec::with_capacity(n_vec);
    let mut b = Matrix::zeros(n_vec, n_vec);
    for n in 0..n_vec {
        let mut v = vec![T::zero(); n_vec];
        v[n] = T::one();
        for m in 0..n {
            // classical: project e_n; modified: project the running residual
            let coef = if T::is_exact() {
                g_col_dot(g, n, &e[m]) / h[m].clone()
            } else {
                bilinear(g, &v, &e[m]) / h[m].clone()
            };
            for (vk, ek) in v.iter_mut().zip(&e[m]) {
                *vk = vk.clone() - coef.clone() * ek.clone();
            }
        }
        let norm = bilinear(g, &v, &v);
        let degenerate = if T::is_exact() {
            norm <= T::zero()
        } else {
            !(norm.to_f64() > GS_PIVOT * g[(n, n)].to_f64().abs())
        };
        if degenerate {
            return Err(Error::NotPositiveDefinite {
                index: n,
                pivot: norm.to_f64(),
            });
        }
        let bnn = leading_factors[n].clone();
        let inv = T::one() / bnn.clone();
        for vk in v.iter_mut() {
            *vk = vk.clone() * inv.clone();
        }
        h.push(norm / (bnn.clone() * bnn));
        e.push(v);
    }
    // b_{m,n} = (E_m, e_n) / h_m
    for n in 0..n_vec {
        for m in 0..=n {
            b[(m, n)] = if m == n {
                leading_factors[n].clone()
            } else {
                g_col_dot(g, n, &e[m]) / h[m].clone()
            };
        }
    }
    let mut z = Vec::with_capacity(n_vec + 1);
    z.push(T::one());
    for n in 0..n_vec {
        let bnn = leading_factors[n].clone();
        let next = z[n].clone() * h[n].clone() * bnn.clone() * bnn;
        z.push(next);
    }
    Ok(OrthogonalizationResult {
        a: Matrix::from_fn(n_vec, n_vec, |m, n| e[n][m].clone()),
        b,
        h,
        b_diag: leading_factors[..n_vec].to_vec(),
        z,
    })
}

/// `(e_n, v) = sum_k g[n][k] v_k`.
fn g_col_dot<T: Scalar>(g: &Matrix<T>, n: usize, v: &[T]) -> T {
    g.row(n)
        .iter()
        .zip(v)
        .fold(T::zero(), |acc, (gk, vk)| acc + gk.clone() * vk.clone())
}

/// `Z[0] = 1` and `Z[n]` the leading `n x n` minor, `n = 1..=N`.
pub fn gram_determinants<T: Scalar>(gram: &GramMatrix<T>) -> Vec<T> {
    gram.leading_minors()
}

/// `a_{m,n}` as a signed minor: `(-1)^{m+n} b_{n,n}^{-1} / Z[n]` times the
/// determinant of the first `n` Gram rows with column `m` removed.
pub fn connection_a<T: Scalar>(gram: &GramMatrix<T>, m: usize, n: usize, leading_factor: &T) -> Result<T> {
    let g = &gram.entries;
    if m > n || n >= g.rows() {
        return Err(Error::IndexOutOfRange(format!("a[{m}][{n}] with N = {}", g.rows())));
    }
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..=n).filter(|&k| k != m).collect();
    let minor = g.select(&rows, &cols).det();
    let zn = g.leading(n).det();
    let signed = if (m + n).is_multiple_of(2) { minor } else { -minor };
    Ok(signed / (zn * leading_factor.clone()))
}

/// Coefficients of `E_n` on `e_0..e_n` from the bordered determinant with
/// last row `(e_0, .., e_n)`, expanded along that row.
pub fn determinant_oracle_vector<T: Scalar>(
    gram: &GramMatrix<T>,
    n: usize,
    leading_factor: &T,
) -> Result<Vec<T>> {
    if n >= gram.size() {
        return Err(Error::IndexOutOfRange(format!("n = {n} with N = {}", gram.size())));
    }
    if leading_factor.is_zero() || !leading_factor.is_finite() {
        return Err(Error::BadFactor { index: n });
    }
    let zn = gram.entries.leading(n).det();
    let pivot_ok = if T::is_exact() {
        zn > T::zero()
    } else {
        zn.to_f64() > 0.0
    };
    if !pivot_ok {
        return Err(Error::NotPositiveDefinite {
            index: n.saturating_sub(1),
            pivot: zn.to_f64(),
        });
    }
    (0..=n).map(|m| connection_a(gram, m, n, leading_factor)).collect()
}

/// `b_{m,n} = (b_{m,m} / Z[m+1]) det[g_{j,k} (j < m); g_{n,k}]`, `k = 0..=m`.
pub fn connection_b<T: Scalar>(
    gram: &GramMatrix<T>,
    result: &OrthogonalizationResult<T>,
    m: usize,
    n: usize,
) -> Result<T> {
    let g = &gram.entries;
    if m > n || n >= g.rows() || n >= result.len() {
        return Err(Error::IndexOutOfRange(format!("b[{m}][{n}] with N = {}", g.rows())));
    }
    let rows: Vec<usize> = (0..m).chain(std::iter::once(n)).collect();
    let cols: Vec<usize> = (0..=m).collect();
    let bordered = g.select(&rows, &cols).det();
    let zm1 = g.leading(m + 1).det();
    Ok(result.b_diag[m].clone() / zm1 * bordered)
}

/// Factored determinant of a matrix that vanishes wherever `j + k` is odd,
/// except possibly in its last row when `last_row_exempt`. Returns
/// `(det B * det C, det B, det C)` with `B` the even-indexed and `C` the
/// odd-indexed principal submatrix; entries of the exempt row at odd index
/// sums never enter.
pub fn checkerboard_det<T: Scalar>(a: &Matrix<T>, last_row_exempt: bool) -> Result<(T, T, T)> {
    if !a.is_square() {
        return Err(Error::Dimension("checkerboard matrix must be square".into()));
    }
    let n = a.rows();
    for r in 0..n {
        if last_row_exempt && r + 1 == n {
            continue;
        }
        for c in 0..n {
            if (r + c) % 2 == 1 && !a[(r, c)].is_zero() {
                return Err(Error::NotCheckerboard { row: r, col: c });
            }
        }
    }
    let even: Vec<usize> = (0..n).step_by(2).collect();
    let odd: Vec<usize> = (1..n).step_by(2).collect();
    let db = a.select(&even, &even).det();
    let dc = a.select(&odd, &odd).det();
    Ok((db.clone() * dc.clone(), db, dc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn gram(rows: Vec<Vec<Rational>>) -> GramMatrix<Rational> {
        GramMatrix {
            entries: Matrix::from_rows(rows),
            basis_label: "test".into(),
        }
    }

    fn ones(n: usize) -> Vec<Rational> {
        vec![q(1, 1); n]
    }

    #[test]
    fn identity_is_fixed() {
        let g = gram(Matrix::<Rational>::identity(3).as_slice().chunks(3).map(|r| r.to_vec()).collect());
        let r = gram_schmidt(&g, &ones(3)).unwrap();
        assert_eq!(r.a, Matrix::identity(3));
        assert_eq!(r.b, Matrix::identity(3));
        assert_eq!(r.h, ones(3));
        assert_eq!(gram_determinants(&g), ones(4));
    }

    #[test]
    fn hankel_examples() {
        let herm = gram(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 2)]]);
        let r = gram_schmidt(&herm, &ones(2)).unwrap();
        assert_eq!(r.vector(1), vec![q(0, 1), q(1, 1)]);
        assert_eq!(r.h, vec![q(1, 1), q(1, 2)]);

        let lag = gram(vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(2, 1)]]);
        let r = gram_schmidt(&lag, &ones(2)).unwrap();
        assert_eq!(r.vector(1), vec![q(-1, 1), q(1, 1)]);
        assert_eq!(r.h[1], q(1, 1));
        assert_eq!(gram_determinants(&lag), ones(3));
        assert_eq!(determinant_oracle_vector(&lag, 1, &q(1, 1)).unwrap(), vec![q(-1, 1), q(1, 1)]);
        assert_eq!(connection_b(&lag, &r, 0, 1).unwrap(), q(1, 1));
        assert_eq!(connection_b(&lag, &r, 1, 1).unwrap(), q(1, 1));
    }

    #[test]
    fn zero_order_oracle() {
        let g = gram(vec![vec![q(2, 1)]]);
        assert_eq!(determinant_oracle_vector(&g, 0, &q(4, 1)).unwrap(), vec![q(1, 4)]);
        assert_eq!(gram_determinants(&g), vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn rejects_bad_input() {
        let g = gram(vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]);
        assert!(matches!(gram_schmidt(&g, &ones(2)), Err(Error::NotPositiveDefinite { index: 1, .. })));
        let g = gram(vec![vec![q(1, 1)]]);
        assert_eq!(gram_schmidt(&g, &[q(0, 1)]), Err(Error::BadFactor { index: 0 }));
    }

    #[test]
    fn checkerboard_examples() {
        let a = Matrix::from_rows(vec![vec![q(5, 1)]]);
        assert_eq!(checkerboard_det(&a, false).unwrap(), (q(5, 1), q(5, 1), q(1, 1)));
        let a = Matrix::from_rows(vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(3, 1)]]);
        assert_eq!(checkerboard_det(&a, false).unwrap(), (q(6, 1), q(2, 1), q(3, 1)));
        let bad = Matrix::from_rows(vec![vec![q(2, 1), q(1, 1)], vec![q(0, 1), q(3, 1)]]);
        assert_eq!(checkerboard_det(&bad, true), Err(Error::NotCheckerboard { row: 0, col: 1 }));
    }
}
