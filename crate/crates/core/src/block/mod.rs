//! Standard block orthogonal (SBO) polynomials.
//!
//! `P_{i;n}` lies in the complement of `P_i` (polynomials of degree `< i`)
//! under the first measure and the family `P_{i;i}, P_{i;i+1}, ...` is
//! orthogonal under the second. Construction is two Gram–Schmidt passes: the
//! standard `Q_n` of the first measure, then `Q_i..Q_{N-1}` under the second.
//!
//! Matrices indexed by polynomial degree are stored with offset `i`: entry
//! `(m - i, n - i)` holds the `(m, n)` coefficient.

mod connections;
mod general;
mod parity;

pub use connections::{cross_i_connection, expand_x_times_p, monomial_connection, XExpansion};
pub use general::{build_general_bo, GeneralBo, SubspaceSpec};
pub use parity::sbo_parity_build;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gso::gram_schmidt;
use crate::matrix::Matrix;
use crate::measures::{moments, GramMatrix, Measure, MomentSequence};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::standard::{build_standard, Normalization, StandardBasis};

#[derive(Debug, Clone)]
pub struct SboBasis<T> {
    pub i: usize,
    pub n_total: usize,
    pub measure2: Measure,
    /// Standard polynomials of the first measure, in whatever normalization
    /// they were built with.
    pub q_basis: StandardBasis<T>,
    pub moments2: MomentSequence<T>,
    /// `gamma[j-i][k-i] = (Q_j, Q_k)_2` for `j, k = i..N-1`.
    pub gamma: GramMatrix<T>,
    /// `Z_{i;i-1} = 1, Z_{i;i}, .., Z_{i;N-1}`.
    pub z: Vec<T>,
    pub normalization: Normalization,
    /// `P_{i;n}`, `n = i..N-1`, in the chosen normalization.
    pub polys: Vec<Polynomial<T>>,
    /// Monic `Phat_{i;n}`.
    pub p_hat: Vec<Polynomial<T>>,
    pub h: Vec<T>,
    pub h_hat: Vec<T>,
    /// `P_{i;n} = sum_m a[m][n] Q_m`.
    pub a: Matrix<T>,
    pub a_hat: Matrix<T>,
    /// `Q_n = sum_m b[m][n] P_{i;m}` for `n >= i`.
    pub b: Matrix<T>,
    pub b_hat: Matrix<T>,
    /// Leading coefficients `K_{i;n}`.
    pub kk: Vec<T>,
    /// Coefficients of `x^{n-1}` and `x^{n-2}` in `Phat_{i;n}`.
    pub r_hat: Vec<T>,
    pub s_hat: Vec<T>,
}

/// `gamma_{j,k} = (Q_j, Q_k)_2`, `j, k = i..N-1`.
pub fn gamma_matrix<T: Scalar>(
    q_basis: &StandardBasis<T>,
    measure2: &Measure,
    i: usize,
) -> Result<GramMatrix<T>> {
    let n = q_basis.len();
    if i > n {
        return Err(Error::IndexOutOfRange(format!("i = {i} with N = {n}")));
    }
    let mom = moments::<T>(measure2, 2 * n.saturating_sub(1))?;
    mom.gram(&q_basis.polys[i..], &format!("Q_{i}..Q_{}", n.saturating_sub(1)))
}

pub fn build_sbo<T: Scalar>(
    measure1: &Measure,
    measure2: &Measure,
    i: usize,
    n: usize,
    normalization: Normalization,
) -> Result<SboBasis<T>> {
    if i > n {
        return Err(Error::IndexOutOfRange(format!("i = {i} exceeds N = {n}")));
    }
    let q = build_standard::<T>(measure1, n, Normalization::Monic)?;
    build_sbo_from(q, measure2, i, normalization)
}

/// Second stage on a prebuilt standard basis, which may carry any leading
/// coefficients `k_n`.
pub fn build_sbo_from<T: Scalar>(
    q_basis: StandardBasis<T>,
    measure2: &Measure,
    i: usize,
    normalization: Normalization,
) -> Result<SboBasis<T>> {
    let n = q_basis.len();
    let gamma = gamma_matrix(&q_basis, measure2, i)?;
    let moments2 = moments::<T>(measure2, 2 * n.saturating_sub(1))?;
    let res = gram_schmidt(&gamma, &q_basis.k[i..])?;
    let raw = RawSbo {
        a_hat: res.a,
        b_hat: res.b,
        h_hat: res.h,
        z: res.z,
    };
    assemble(q_basis, measure2.clone(), moments2, gamma, i, raw, normalization)
}

pub(crate) struct RawSbo<T> {
    pub a_hat: Matrix<T>,
    pub b_hat: Matrix<T>,
    pub h_hat: Vec<T>,
    pub z: Vec<T>,
}

pub(crate) fn assemble<T: Scalar>(
    q_basis: StandardBasis<T>,
    measure2: Measure,
    moments2: MomentSequence<T>,
    gamma: GramMatrix<T>,
    i: usize,
    raw: RawSbo<T>,
    normalization: Normalization,
) -> Result<SboBasis<T>> {
    let n_total = q_basis.len();
    let d = n_total - i;
    let p_hat: Vec<Polynomial<T>> = (0..d)
        .map(|c| {
            let terms: Vec<(T, &Polynomial<T>)> = (0..=c)
                .map(|r| (raw.a_hat[(r, c)].clone(), &q_basis.polys[i + r]))
                .collect();
            Polynomial::combine(&terms)
        })
        .collect();
    let r_hat = (0..d)
        .map(|c| {
            let n = i + c;
            if n == 0 {
                T::zero()
            } else {
                p_hat[c].coeff(n - 1)
            }
        })
        .collect();
    let s_hat = (0..d)
        .map(|c| {
            let n = i + c;
            if n < 2 {
                T::zero()
            } else {
                p_hat[c].coeff(n - 2)
            }
        })
        .collect();
    let mut sbo = SboBasis {
        i,
        n_total,
        measure2,
        q_basis,
        moments2,
        gamma,
        z: raw.z,
        normalization: Normalization::Monic,
        polys: p_hat.clone(),
        p_hat,
        h: raw.h_hat.clone(),
        h_hat: raw.h_hat,
        a: raw.a_hat.clone(),
        a_hat: raw.a_hat,
        b: raw.b_hat.clone(),
        b_hat: raw.b_hat,
        kk: vec![T::one(); d],
        r_hat,
        s_hat,
    };
    if normalization != Normalization::Monic {
        sbo = normalize_sbo(&sbo, normalization)?;
    }
    Ok(sbo)
}

/// Rescales every `P_{i;n}`: monic (`K = 1`), orthonormal (`H = 1`,
/// `K > 0`) or determinant-normalized (`K_{i;n} = k_n Z_{i;n-1}`).
pub fn normalize_sbo<T: Scalar>(sbo: &SboBasis<T>, mode: Normalization) -> Result<SboBasis<T>> {
    let d = sbo.len();
    let kk: Vec<T> = match mode {
        Normalization::Monic => vec![T::one(); d],
        Normalization::Orthonormal => sbo
            .h_hat
            .iter()
            .map(|h| (T::one() / h.clone()).sqrt())
            .collect::<Result<_>>()?,
        Normalization::DetNormalized => (0..d)
            .map(|c| sbo.q_basis.k[sbo.i + c].clone() * sbo.z[c].clone())
            .collect(),
    };
    let mut out = sbo.clone();
    out.normalization = mode;
    out.polys = (0..d).map(|c| sbo.p_hat[c].scale(&kk[c])).collect();
    out.h = (0..d)
        .map(|c| kk[c].clone() * kk[c].clone() * sbo.h_hat[c].clone())
        .collect();
    out.a = Matrix::from_fn(d, d, |r, c| sbo.a_hat[(r, c)].clone() * kk[c].clone());
    out.b = Matrix::from_fn(d, d, |r, c| sbo.b_hat[(r, c)].clone() / kk[r].clone());
    out.kk = kk;
    Ok(out)
}

impl<T: Scalar> SboBasis<T> {
    /// Number of built polynomials, `N - i`.
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `P_{i;n}` by degree.
    pub fn poly(&self, n: usize) -> Result<&Polynomial<T>> {
        self.offset(n).map(|c| &self.polys[c])
    }

    pub fn monic(&self, n: usize) -> Result<&Polynomial<T>> {
        self.offset(n).map(|c| &self.p_hat[c])
    }

    /// `Z_{i;n}` for `n = i-1..N-1`.
    pub fn z_at(&self, n: isize) -> Result<&T> {
        let c = n + 1 - self.i as isize;
        if c < 0 || c as usize >= self.z.len() {
            return Err(Error::IndexOutOfRange(format!("Z_{{{};{n}}}", self.i)));
        }
        Ok(&self.z[c as usize])
    }

    fn offset(&self, n: usize) -> Result<usize> {
        if n < self.i || n >= self.n_total {
            return Err(Error::IndexOutOfRange(format!(
                "degree {n} outside {}..{}",
                self.i, self.n_total
            )));
        }
        Ok(n - self.i)
    }

    /// `max |(x^m, P_{i;n})|` over `m < i`, each term divided by the sum of
    /// the absolute values of its moment expansion.
    pub fn constraint_residual(&self) -> Result<f64> {
        let mom = &self.q_basis.moments;
        let mut worst: f64 = 0.0;
        for m in 0..self.i {
            let xm = Polynomial::monomial(m);
            for p in &self.polys {
                worst = worst.max(relative_inner(mom, &xm, p)?);
            }
        }
        Ok(worst)
    }

    /// `max_{m != n} |(P_{i;m}, P_{i;n})_2|` and `max |(P_{i;n}, P_{i;n})_2 - H_{i;n}|`,
    /// relative as in [`Self::constraint_residual`].
    pub fn orthogonality_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (c, p) in self.polys.iter().enumerate() {
            for (r, q) in self.polys.iter().enumerate().take(c + 1) {
                let v = if r == c {
                    let got = self.moments2.inner(p, q)?;
                    let scale = abs_inner(&self.moments2, p, q)?;
                    (got - self.h[c].clone()).to_f64().abs() / scale.max(f64::MIN_POSITIVE)
                } else {
                    relative_inner(&self.moments2, p, q)?
                };
                worst = worst.max(v);
            }
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "i": self.i,
            "N": self.n_total,
            "measures": [self.q_basis.measure.to_json(), self.measure2.to_json()],
            "normalization": self.normalization.as_str(),
            "P": self.polys.iter().map(Polynomial::to_json).collect::<Vec<_>>(),
            "H": self.h.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "Z": self.z.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "A": self.a.to_json(),
            "B": self.b.to_json(),
        })
    }
}

/// `sum_{j,k} |p_j q_k mu_{j+k}|`, the scale against which a computed inner
/// product is judged.
pub fn abs_inner<T: Scalar>(
    mom: &MomentSequence<T>,
    p: &Polynomial<T>,
    q: &Polynomial<T>,
) -> Result<f64> {
    let mut acc = 0.0;
    for (j, a) in p.coeffs().iter().enumerate() {
        for (k, b) in q.coeffs().iter().enumerate() {
            acc += (a.to_f64() * b.to_f64() * mom.get(j + k)?.to_f64()).abs();
        }
    }
    Ok(acc)
}

pub fn relative_inner<T: Scalar>(
    mom: &MomentSequence<T>,
    p: &Polynomial<T>,
    q: &Polynomial<T>,
) -> Result<f64> {
    let v = mom.inner(p, q)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    Ok(v.to_f64().abs() / abs_inner(mom, p, q)?.max(f64::MIN_POSITIVE))
}

/// Everything the bordered-determinant formulas give for one `(i, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SboOracle<T> {
    pub p_hat: Polynomial<T>,
    /// `Z_{i;n}`.
    pub z: T,
    pub h_hat: T,
    /// `Ahat_{i;m,n}`, `m = i..n`.
    pub a_hat: Vec<T>,
    /// `Bhat_{i;m,n}`, `m = i..n`.
    pub b_hat: Vec<T>,
}

/// `Phat_{i;n} = k_n^{-1} / Z_{i;n-1} det[[gamma_{j,k}]_{j=i..n-1}; Q_k]_{k=i..n}`,
/// expanded along its polynomial row, with the norm and both connection
/// columns from their own minors. Reads only `gamma` and the standard basis.
pub fn sbo_determinant_oracle<T: Scalar>(
    q_basis: &StandardBasis<T>,
    gamma: &GramMatrix<T>,
    i: usize,
    n: usize,
) -> Result<SboOracle<T>> {
    if n < i || n >= q_basis.len() || n - i >= gamma.size() {
        return Err(Error::IndexOutOfRange(format!("(i, n) = ({i}, {n})")));
    }
    let g = &gamma.entries;
    let d = n - i;
    let kn = q_basis.k[n].clone();
    let z_prev = g.leading(d).det();
    let z = g.leading(d + 1).det();
    if z_prev.is_zero() || z.is_zero() {
        return Err(Error::NotPositiveDefinite {
            index: n,
            pivot: z.to_f64(),
        });
    }
    let rows: Vec<usize> = (0..d).collect();
    let a_hat: Vec<T> = (0..=d)
        .map(|m| {
            let cols: Vec<usize> = (0..=d).filter(|&k| k != m).collect();
            let minor = g.select(&rows, &cols).det();
            let signed = if (m + d).is_multiple_of(2) { minor } else { -minor };
            signed / (kn.clone() * z_prev.clone())
        })
        .collect();
    let terms: Vec<(T, &Polynomial<T>)> = a_hat
        .iter()
        .enumerate()
        .map(|(m, a)| (a.clone(), &q_basis.polys[i + m]))
        .collect();
    let p_hat = Polynomial::combine(&terms);
    let h_hat = z.clone() / (z_prev * kn.clone() * kn);
    // Bhat_{i;m,n} = k_m / Z_{i;m} det[[gamma_{j,k}]_{j=i..m-1}; gamma_{n,k}]_{k=i..m}
    let b_hat = (0..=d)
        .map(|m| {
            let rows: Vec<usize> = (0..m).chain(std::iter::once(d)).collect();
            let cols: Vec<usize> = (0..=m).collect();
            let bordered = g.select(&rows, &cols).det();
            q_basis.k[i + m].clone() / g.leading(m + 1).det() * bordered
        })
        .collect();
    Ok(SboOracle {
        p_hat,
        z,
        h_hat,
        a_hat,
        b_hat,
    })
}
