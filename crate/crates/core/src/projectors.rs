//! Orthogonal projectors onto `P_i` and onto its complement, as explicit
//! matrices acting on monomial coefficient columns.

use serde::Serialize;
use serde_json::{json, Value};

use crate::block::{build_sbo, SboBasis};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::{hankel_matrix, moments, Measure, MomentSequence};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::standard::{Normalization, StandardBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProjectorLabel {
    OntoConstraint,
    OntoComplement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorMatrix<T> {
    pub entries: Matrix<T>,
    pub label: ProjectorLabel,
}

impl<T: Scalar> ProjectorMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn apply(&self, p: &Polynomial<T>) -> Result<Polynomial<T>> {
        if p.degree().is_some_and(|d| d >= self.dim()) {
            return Err(Error::Degree(format!("degree {p} exceeds the projector dimension {}", self.dim())));
        }
        Ok(Polynomial::new(self.entries.mul_vec(&p.padded(self.dim()))))
    }

    /// `M M - M`.
    pub fn idempotence_defect(&self) -> Matrix<T> {
        self.entries
            .mul(&self.entries)
            .expect("square projector")
            .sub(&self.entries)
    }

    pub fn to_json(&self) -> Value {
        json!({"label": self.label, "entries": self.entries.to_json()})
    }
}

/// `col(p) * row(q)` where `row(q)` is the functional `r -> (q, r)`.
fn rank_one_sum<T: Scalar>(
    n: usize,
    terms: impl Iterator<Item = (Vec<T>, Vec<T>, T)>,
    gram: &Matrix<T>,
) -> Matrix<T> {
    let mut m: Matrix<T> = Matrix::zeros(n, n);
    for (left, right, weight) in terms {
        let row = gram.transpose().mul_vec(&right);
        for r in 0..n {
            if left[r].is_zero() {
                continue;
            }
            let lw = left[r].clone() * weight.clone();
            for c in 0..n {
                m[(r, c)] = m[(r, c)].clone() + lw.clone() * row[c].clone();
            }
        }
    }
    m
}

fn pair<T: Scalar>(onto: Matrix<T>) -> (ProjectorMatrix<T>, ProjectorMatrix<T>) {
    let comp = Matrix::identity(onto.rows()).sub(&onto);
    (
        ProjectorMatrix {
            entries: onto,
            label: ProjectorLabel::OntoConstraint,
        },
        ProjectorMatrix {
            entries: comp,
            label: ProjectorLabel::OntoComplement,
        },
    )
}

/// `p -> sum_{n<i} Q_n (Q_n, p) / h_n` and its complement.
pub fn projectors_from_q<T: Scalar>(
    q_basis: &StandardBasis<T>,
    i: usize,
) -> Result<(ProjectorMatrix<T>, ProjectorMatrix<T>)> {
    let n = q_basis.len();
    if i > n {
        return Err(Error::IndexOutOfRange(format!("i = {i} with N = {n}")));
    }
    let hankel = hankel_matrix(&q_basis.moments, n)?.entries;
    let terms = (0..i).map(|m| {
        let c = q_basis.polys[m].padded(n);
        (c.clone(), c, T::one() / q_basis.h[m].clone())
    });
    Ok(pair(rank_one_sum(n, terms, &hankel)))
}

/// The same projector written through the second measure: with `P_{0;k}`
/// the standard polynomials of the second measure,
/// `sum_{j,k} P_{0;j} (sum_{n<i} B_{0;j,n} A_{0;n,k}) / H_{0;k} (P_{0;k}, .)_2`.
pub fn projectors_from_second<T: Scalar>(
    measure1: &Measure,
    measure2: &Measure,
    i: usize,
    n: usize,
) -> Result<(ProjectorMatrix<T>, ProjectorMatrix<T>)> {
    if i > n {
        return Err(Error::IndexOutOfRange(format!("i = {i} with N = {n}")));
    }
    let sbo = build_sbo::<T>(measure1, measure2, 0, n, Normalization::Monic)?;
    let hankel2 = hankel_matrix(&sbo.moments2, n)?.entries;
    let kernel = Matrix::from_fn(n, n, |j, k| {
        (0..i).fold(T::zero(), |acc, m| acc + sbo.b[(j, m)].clone() * sbo.a[(m, k)].clone())
    });
    let mut terms = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if kernel[(j, k)].is_zero() {
                continue;
            }
            terms.push((
                sbo.polys[j].padded(n),
                sbo.polys[k].padded(n),
                kernel[(j, k)].clone() / sbo.h[k].clone(),
            ));
        }
    }
    Ok(pair(rank_one_sum(n, terms.into_iter(), &hankel2)))
}

/// The composite inner product: `(P1 p, P1 q)_1 + (Pc p, Pc q)_2`, with the
/// constraint part measured by `first` (the basis' first measure by
/// default). There is no single-integral form.
pub fn inner0<T: Scalar>(
    p: &Polynomial<T>,
    q: &Polynomial<T>,
    sbo: &SboBasis<T>,
    first: Option<&Measure>,
) -> Result<T> {
    let (onto, comp) = projectors_from_q(&sbo.q_basis, sbo.i)?;
    let mom1: MomentSequence<T> = match first {
        Some(m) => moments::<T>(m, 2 * sbo.n_total.saturating_sub(1))?,
        None => sbo.q_basis.moments.clone(),
    };
    let in_constraint = mom1.inner(&onto.apply(p)?, &onto.apply(q)?)?;
    let in_complement = sbo.moments2.inner(&comp.apply(p)?, &comp.apply(q)?)?;
    Ok(in_constraint + in_complement)
}
