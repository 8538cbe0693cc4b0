//! Standard orthogonal polynomials `Q_n` of a single measure.
//!
//! Indices follow the moment convention: `Z_n = det[mu_{j+k}]_{j,k=0..n}` with
//! `Z_{-1} = 1`, so `Z_n` here is the `(n+1) x (n+1)` Hankel minor. Everything
//! is in units of the zeroth moment `c_0`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gso::{checkerboard_det, determinant_oracle_vector, gram_schmidt};
use crate::matrix::Matrix;
use crate::measures::{hankel_matrix, moments, GramMatrix, Measure, MomentSequence};
use crate::poly::Polynomial;
use crate::scalar::{Rational, Scalar};
use crate::tolerances::FLOAT_MAX_N;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `k_n = 1`.
    #[default]
    Monic,
    /// `h_n = 1`, `k_n > 0`. Leaves the rationals unless every `Z_{n-1}/Z_n`
    /// is a perfect square.
    Orthonormal,
    /// `k_n = Z_{n-1}`, so that `h_n = Z_{n-1} Z_n`.
    DetNormalized,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Monic => "monic",
            Normalization::Orthonormal => "orthonormal",
            Normalization::DetNormalized => "det-normalized",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "monic" => Ok(Normalization::Monic),
            "orthonormal" => Ok(Normalization::Orthonormal),
            "det-normalized" | "det" => Ok(Normalization::DetNormalized),
            _ => Err(Error::Parse(format!("unknown normalization {s:?}"))),
        }
    }
}

/// `Q_{n+1} = (A_n x + B_n) Q_n - C_n Q_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

#[derive(Debug, Clone)]
pub struct StandardBasis<T> {
    pub measure: Measure,
    pub moments: MomentSequence<T>,
    pub normalization: Normalization,
    /// `Q_0..Q_{N-1}` in the chosen normalization.
    pub polys: Vec<Polynomial<T>>,
    /// Leading coefficients `k_n`.
    pub k: Vec<T>,
    /// `h_n = (Q_n, Q_n)`.
    pub h: Vec<T>,
    /// Norms of the monic polynomials.
    pub h_hat: Vec<T>,
    /// `r_n`: coefficient of `x^{n-1}` in the monic `Q_n`; `r_0 = 0`.
    pub r_hat: Vec<T>,
    /// `s_n`: coefficient of `x^{n-2}` in the monic `Q_n`; zero for `n < 2`.
    pub s_hat: Vec<T>,
    /// Column `n` holds the monomial coefficients of the monic `Q_n`.
    pub a_hat: Matrix<T>,
    /// `x^n = sum_m b_hat[m][n] Qhat_m`.
    pub b_hat: Matrix<T>,
    /// `Z_0..Z_{N-1}`.
    pub z: Vec<T>,
}

struct MonicParts<T> {
    a_hat: Matrix<T>,
    b_hat: Matrix<T>,
    h_hat: Vec<T>,
    z: Vec<T>,
}

fn check_size<T: Scalar>(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("at least one polynomial is required".into()));
    }
    if !T::is_exact() && n > FLOAT_MAX_N {
        return Err(Error::Conditioning {
            n,
            limit: FLOAT_MAX_N,
        });
    }
    Ok(())
}

/// Builds `Q_0..Q_{N-1}` by Gram–Schmidt on the Hankel matrix of monomials.
/// In the exact backend every monic polynomial is compared with the
/// bordered-determinant formula and a disagreement is an error.
pub fn build_standard<T: Scalar>(
    measure: &Measure,
    n: usize,
    normalization: Normalization,
) -> Result<StandardBasis<T>> {
    check_size::<T>(n)?;
    let mom = moments::<T>(measure, 2 * n - 2)?;
    let gram = hankel_matrix(&mom, n)?;
    let ones = vec![T::one(); n];
    let res = gram_schmidt(&gram, &ones)?;
    if T::is_exact() {
        for m in 0..n {
            let oracle = determinant_oracle_vector(&gram, m, &T::one())?;
            if oracle != res.vector(m) {
                return Err(Error::OracleMismatch(format!(
                    "monic Q_{m}: Gram-Schmidt and determinant formula differ"
                )));
            }
        }
    }
    let parts = MonicParts {
        a_hat: res.a,
        b_hat: res.b,
        h_hat: res.h,
        z: res.z[1..].to_vec(),
    };
    assemble(measure.clone(), mom, parts, normalization)
}

/// Even and odd polynomials from the two half-size Hankel systems
/// `[mu_{2j+2k}]` and `[mu_{2j+2k+2}]` of a symmetric measure. Full Hankel
/// minors come from the checkerboard factorization.
pub fn parity_split_build<T: Scalar>(
    measure: &Measure,
    n: usize,
    normalization: Normalization,
) -> Result<StandardBasis<T>> {
    if !measure.symmetric() {
        return Err(Error::NotSymmetric);
    }
    check_size::<T>(n)?;
    let mom = moments::<T>(measure, 2 * n - 2)?;
    let n_even = n.div_ceil(2);
    let n_odd = n / 2;
    let sub = |size: usize, shift: usize, label: &str| GramMatrix {
        entries: Matrix::from_fn(size, size, |j, k| mom.mu[2 * j + 2 * k + shift].clone()),
        basis_label: label.to_string(),
    };
    let even = gram_schmidt(&sub(n_even, 0, "even powers"), &vec![T::one(); n_even])?;
    let odd = gram_schmidt(&sub(n_odd, 2, "odd powers"), &vec![T::one(); n_odd])?;
    let mut a_hat = Matrix::zeros(n, n);
    let mut b_hat = Matrix::zeros(n, n);
    let mut h_hat = Vec::with_capacity(n);
    for deg in 0..n {
        let (r, half) = if deg % 2 == 0 { (&even, deg / 2) } else { (&odd, deg / 2) };
        let par = deg % 2;
        for m in 0..=half {
            a_hat[(2 * m + par, deg)] = r.a[(m, half)].clone();
            b_hat[(2 * m + par, deg)] = r.b[(m, half)].clone();
        }
        h_hat.push(r.h[half].clone());
    }
    let hankel = hankel_matrix(&mom, n)?;
    let z = (1..=n)
        .map(|size| checkerboard_det(&hankel.entries.leading(size), false).map(|t| t.0))
        .collect::<Result<Vec<_>>>()?;
    assemble(
        measure.clone(),
        mom,
        MonicParts {
            a_hat,
            b_hat,
            h_hat,
            z,
        },
        normalization,
    )
}

fn assemble<T: Scalar>(
    measure: Measure,
    moments: MomentSequence<T>,
    parts: MonicParts<T>,
    normalization: Normalization,
) -> Result<StandardBasis<T>> {
    let MonicParts {
        a_hat,
        b_hat,
        h_hat,
        z,
    } = parts;
    let n = h_hat.len();
    let k: Vec<T> = match normalization {
        Normalization::Monic => vec![T::one(); n],
        Normalization::Orthonormal => h_hat
            .iter()
            .map(|h| (T::one() / h.clone()).sqrt())
            .collect::<Result<_>>()?,
        Normalization::DetNormalized => (0..n)
            .map(|m| if m == 0 { T::one() } else { z[m - 1].clone() })
            .collect(),
    };
    let polys: Vec<Polynomial<T>> = (0..n)
        .map(|m| Polynomial::new(a_hat.col(m)[..=m].to_vec()).scale(&k[m]))
        .collect();
    let h = (0..n)
        .map(|m| k[m].clone() * k[m].clone() * h_hat[m].clone())
        .collect();
    let r_hat = (0..n)
        .map(|m| if m == 0 { T::zero() } else { a_hat[(m - 1, m)].clone() })
        .collect();
    let s_hat = (0..n)
        .map(|m| if m < 2 { T::zero() } else { a_hat[(m - 2, m)].clone() })
        .collect();
    Ok(StandardBasis {
        measure,
        moments,
        normalization,
        polys,
        k,
        h,
        h_hat,
        r_hat,
        s_hat,
        a_hat,
        b_hat,
        z,
    })
}

impl<T: Scalar> StandardBasis<T> {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `Z_{n-1}`, with `Z_{-1} = 1`.
    pub fn z_prev(&self, n: usize) -> T {
        if n == 0 {
            T::one()
        } else {
            self.z[n - 1].clone()
        }
    }

    /// The monic `Qhat_n`.
    pub fn monic(&self, n: usize) -> Polynomial<T> {
        Polynomial::new(self.a_hat.col(n)[..=n].to_vec())
    }

    pub fn monic_polys(&self) -> Vec<Polynomial<T>> {
        (0..self.len()).map(|n| self.monic(n)).collect()
    }

    /// `(A_n, B_n, C_n)` for `n = 0..N-2`, with `C_0 = 0`.
    pub fn recurrence(&self) -> Vec<Recurrence<T>> {
        let n = self.len();
        let mut out: Vec<Recurrence<T>> = Vec::with_capacity(n.saturating_sub(1));
        for m in 0..n.saturating_sub(1) {
            let a = self.k[m + 1].clone() / self.k[m].clone();
            let b = a.clone() * (self.r_hat[m + 1].clone() - self.r_hat[m].clone());
            let c = if m == 0 {
                T::zero()
            } else {
                a.clone() / out[m - 1].a.clone() * (self.h[m].clone() / self.h[m - 1].clone())
            };
            out.push(Recurrence { a, b, c });
        }
        out
    }

    /// Largest `|Q_{n+1} - (A_n x + B_n) Q_n + C_n Q_{n-1}|` coefficient,
    /// relative to the largest coefficient of `Q_{n+1}`.
    pub fn recurrence_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, r) in self.recurrence().iter().enumerate() {
            let lin = Polynomial::new(vec![r.b.clone(), r.a.clone()]);
            let mut rhs = &lin * &self.polys[m];
            if m > 0 {
                rhs = &rhs - &self.polys[m - 1].scale(&r.c);
            }
            let res = &self.polys[m + 1] - &rhs;
            let scale = self.polys[m + 1].max_abs().max(f64::MIN_POSITIVE);
            worst = worst.max(res.max_abs() / scale);
        }
        worst
    }

    /// `max_{j != k} |(Q_j, Q_k)| / max_n h_n`.
    pub fn orthogonality_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for j in 0..self.len() {
            for k in 0..j {
                let v = self.moments.inner(&self.polys[j], &self.polys[k])?;
                worst = worst.max(v.to_f64().abs());
            }
        }
        let hmax = self.h.iter().map(|h| h.to_f64().abs()).fold(0.0, f64::max);
        Ok(worst / hmax.max(f64::MIN_POSITIVE))
    }

    /// The polynomials and norms under custom leading coefficients.
    pub fn with_leading(&self, k: &[T]) -> Result<(Vec<Polynomial<T>>, Vec<T>)> {
        if k.len() < self.len() {
            return Err(Error::Dimension(format!(
                "{} leading coefficients for {} polynomials",
                k.len(),
                self.len()
            )));
        }
        if let Some(index) = k.iter().position(|v| v.is_zero() || !v.is_finite()) {
            return Err(Error::BadFactor { index });
        }
        let polys = (0..self.len()).map(|n| self.monic(n).scale(&k[n])).collect();
        let h = (0..self.len())
            .map(|n| k[n].clone() * k[n].clone() * self.h_hat[n].clone())
            .collect();
        Ok((polys, h))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "measure": self.measure.to_json(),
            "normalization": self.normalization.as_str(),
            "c0": {"value": self.moments.c0.value, "symbolic": self.moments.c0.symbolic},
            "polys": self.polys.iter().map(Polynomial::to_json).collect::<Vec<_>>(),
            "h": self.h.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "recurrence": self
                .recurrence()
                .iter()
                .map(|r| json!([r.a.to_json(), r.b.to_json(), r.c.to_json()]))
                .collect::<Vec<_>>(),
        })
    }
}

/// Monic polynomials rebuilt from the recurrence of a Hankel build: the
/// coefficients come from the moments, the polynomials only from replaying
/// `Qhat_{n+1} = (x + B_n) Qhat_n - C_n Qhat_{n-1}`.
pub fn build_by_recurrence<T: Scalar>(measure: &Measure, n: usize) -> Result<Vec<Polynomial<T>>> {
    let basis = build_standard::<T>(measure, n, Normalization::Monic)?;
    let rec = basis.recurrence();
    let mut out: Vec<Polynomial<T>> = vec![Polynomial::constant(T::one())];
    for (m, r) in rec.iter().enumerate() {
        let lin = Polynomial::new(vec![r.b.clone(), r.a.clone()]);
        let mut next = &lin * &out[m];
        if m > 0 {
            next = &next - &out[m - 1].scale(&r.c);
        }
        out.push(next);
    }
    Ok(out)
}

/// Leading coefficients `2^n` of the physicists' Hermite polynomials,
/// orthogonal for `exp(-x^2)`.
pub fn hermite_leading(n: usize) -> Vec<Rational> {
    (0..n)
        .map(|m| Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(2), m)))
        .collect()
}

/// Leading coefficients `(-1)^n / n!` of the generalized Laguerre
/// polynomials, orthogonal for `x^{z-1} exp(-x)`.
pub fn laguerre_leading(n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut fact = num_bigint::BigInt::from(1);
    for m in 0..n {
        if m > 0 {
            fact *= m;
        }
        let sign = if m % 2 == 0 { 1 } else { -1 };
        out.push(Rational::new(sign.into(), fact.clone()));
    }
    out
}
