use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

use super::SboBasis;

/// Monomial coefficients of every `P_{i;n}`:
/// `C_{i;l,n} = sum_{m=max(i,l)}^{n} a_{l,m} A_{i;m,n}`, with `a` the monomial
/// connection of the standard basis. Rows are `l = 0..N-1`, column `n - i`.
pub fn monomial_connection<T: Scalar>(sbo: &SboBasis<T>) -> Matrix<T> {
    let q = &sbo.q_basis;
    let i = sbo.i;
    Matrix::from_fn(sbo.n_total, sbo.len(), |l, c| {
        let n = i + c;
        (i.max(l)..=n).fold(T::zero(), |acc, m| {
            let a_lm = q.a_hat[(l, m)].clone() * q.k[m].clone();
            acc + a_lm * sbo.a[(m - i, c)].clone()
        })
    })
}

/// `Chat_{i,j;l,n} = sum_{m=max(j,l)}^{n} Bhat_{i;l,m} Ahat_{j;m,n}`, so that
/// `Phat_{j;n} = sum_l Phat_{i;l} Chat_{i,j;l,n}`. Rows `l - i`, columns `n - j`.
pub fn cross_i_connection<T: Scalar>(sbo_i: &SboBasis<T>, sbo_j: &SboBasis<T>) -> Result<Matrix<T>> {
    if sbo_i.q_basis.measure.to_json() != sbo_j.q_basis.measure.to_json()
        || sbo_i.measure2.to_json() != sbo_j.measure2.to_json()
        || sbo_i.q_basis.k != sbo_j.q_basis.k
    {
        return Err(Error::MeasureMismatch);
    }
    if sbo_i.n_total != sbo_j.n_total {
        return Err(Error::Dimension(format!(
            "N = {} and N = {}",
            sbo_i.n_total, sbo_j.n_total
        )));
    }
    let (i, j) = (sbo_i.i, sbo_j.i);
    if i > j {
        return Err(Error::IndexOutOfRange(format!("i = {i} > j = {j}")));
    }
    Ok(Matrix::from_fn(sbo_i.len(), sbo_j.len(), |r, c| {
        let l = i + r;
        let n = j + c;
        (j.max(l)..=n).fold(T::zero(), |acc, m| {
            acc + sbo_i.b_hat[(l - i, m - i)].clone() * sbo_j.a_hat[(m - j, c)].clone()
        })
    }))
}

/// `x Phat_{i;n} = beta Q_{i-1} + sum_{m=i}^{n+1} eta_m Phat_{i;m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct XExpansion<T> {
    pub i: usize,
    pub n: usize,
    /// Coefficient on `Q_{i-1}`; zero when `i = 0`.
    pub beta: T,
    /// `eta[m - i]` for `m = i..=n+1`.
    pub eta: Vec<T>,
    /// Degrees `m < n - 1` with `eta_m != 0`, which a three-term recurrence
    /// would forbid.
    pub far_terms: Vec<usize>,
}

/// Expands `x Phat_{i;n}` using only the standard recurrence and the SBO
/// connections: `x Q_m = A_m^{-1}(Q_{m+1} - B_m Q_m + C_m Q_{m-1})`, then
/// `Q_m = sum_l Bhat_{i;l,m} Phat_{i;l}` for `m >= i`.
pub fn expand_x_times_p<T: Scalar>(sbo: &SboBasis<T>, n: usize) -> Result<XExpansion<T>> {
    let i = sbo.i;
    if n < i || n + 2 > sbo.n_total {
        return Err(Error::IndexOutOfRange(format!(
            "x P_{{{i};{n}}} needs {i} <= n <= N - 2 = {}",
            sbo.n_total as isize - 2
        )));
    }
    let rec = sbo.q_basis.recurrence();
    // coefficients of x Phat on Q_0..Q_{n+1}
    let mut on_q = vec![T::zero(); n + 2];
    for m in i..=n {
        let am = sbo.a_hat[(m - i, n - i)].clone();
        if am.is_zero() {
            continue;
        }
        let r = &rec[m];
        let inv = am / r.a.clone();
        on_q[m + 1] = on_q[m + 1].clone() + inv.clone();
        on_q[m] = on_q[m].clone() - inv.clone() * r.b.clone();
        if m > 0 {
            on_q[m - 1] = on_q[m - 1].clone() + inv * r.c.clone();
        }
    }
    let beta = if i > 0 { on_q[i - 1].clone() } else { T::zero() };
    let eta: Vec<T> = (i..=n + 1)
        .map(|l| {
            (l..=n + 1).fold(T::zero(), |acc, m| {
                acc + sbo.b_hat[(l - i, m - i)].clone() * on_q[m].clone()
            })
        })
        .collect();
    let scale = eta.iter().map(|e| e.to_f64().abs()).fold(0.0, f64::max);
    let far_terms = (i..n.saturating_sub(1))
        .filter(|&m| !eta[m - i].negligible(scale, crate::tolerances::FLOAT_RESIDUAL))
        .collect();
    Ok(XExpansion {
        i,
        n,
        beta,
        eta,
        far_terms,
    })
}

impl<T: Scalar> XExpansion<T> {
    /// `beta Q_{i-1} + sum eta_m Phat_{i;m}` as a polynomial.
    pub fn reconstruct(&self, sbo: &SboBasis<T>) -> Polynomial<T> {
        let mut terms: Vec<(T, &Polynomial<T>)> = self
            .eta
            .iter()
            .enumerate()
            .map(|(c, e)| (e.clone(), &sbo.p_hat[c]))
            .collect();
        if self.i > 0 {
            terms.push((self.beta.clone(), &sbo.q_basis.polys[self.i - 1]));
        }
        Polynomial::combine(&terms)
    }
}
