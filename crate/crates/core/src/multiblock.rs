//! Three mutually block orthogonal subspaces, and the common orthogonal
//! complement of one subspace under two inner products.

use std::fmt;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gso::gram_schmidt;
use crate::matrix::Matrix;
use crate::measures::{moments, Measure, MomentSequence};
use crate::poly::Polynomial;
use crate::scalar::{Rational, Scalar};
use crate::tolerances::SVD_GAP;

/// Find `E_3` with `(E_1, E_3)_{13} = 0` and `(E_2, E_3)_{23} = 0`.
#[derive(Debug, Clone)]
pub struct ThreeSubspaceProblem<T> {
    pub n1: usize,
    pub n2: usize,
    /// `N` polynomials: the first `n1` span `E_1`, the next `n2` span `E_2`,
    /// the rest complete the basis.
    pub basis: Vec<Polynomial<T>>,
    pub inner_13: Measure,
    pub inner_23: Measure,
    /// When set, the `E_2` vectors are first made orthogonal to `E_1` under it.
    pub inner_12: Option<Measure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Unique,
    NoSolution,
    Family(usize),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Unique => write!(f, "Unique"),
            Classification::NoSolution => write!(f, "NoSolution"),
            Classification::Family(k) => write!(f, "Family({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThirdSubspaceSolution<T> {
    pub classification: Classification,
    /// `E_2` basis actually used, after the optional orthogonalization.
    pub e2: Vec<Polynomial<T>>,
    /// `eps_n`, one per completing vector; the particular solution (free
    /// parameters zero) for a family. Empty when there is no solution.
    pub basis: Vec<Polynomial<T>>,
    /// Directions that may be added to any `eps_n` in a family.
    pub kernel: Vec<Polynomial<T>>,
    /// `(rank G, max_n rank (G | V_n))`.
    pub ranks: (usize, usize),
    /// Smallest kept over largest singular value, float backend only.
    pub svd_gap: Option<f64>,
}

fn rank_with_gap<T: Scalar>(m: &Matrix<T>) -> (usize, Option<f64>) {
    if T::is_exact() {
        return (m.rank(0.0), None);
    }
    let d = DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)].to_f64());
    let sv = d.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return (0, None);
    }
    let rank = s.iter().filter(|&&v| v > SVD_GAP * top).count();
    let gap = if rank > 0 { Some(s[rank - 1] / top) } else { None };
    (rank, gap)
}

fn combine<T: Scalar>(coeffs: &[T], polys: &[Polynomial<T>]) -> Polynomial<T> {
    let terms: Vec<(T, &Polynomial<T>)> = coeffs.iter().cloned().zip(polys).collect();
    Polynomial::combine(&terms)
}

fn max_degree<T: Scalar>(polys: &[Polynomial<T>]) -> usize {
    polys.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
}

/// Null space basis of a reduced echelon matrix with the given pivots.
fn kernel_from_rref<T: Scalar>(red: &Matrix<T>, pivots: &[usize], cols: usize) -> Vec<Vec<T>> {
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![T::zero(); cols];
            v[free] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -red[(r, free)].clone();
            }
            v
        })
        .collect()
}

/// Solves `G c_n = -V_n` for every completing vector and classifies the
/// problem by comparing `rank G` with the rank of each augmented matrix.
pub fn solve_third_subspace<T: Scalar>(
    problem: &ThreeSubspaceProblem<T>,
) -> Result<ThirdSubspaceSolution<T>> {
    let (n1, n2) = (problem.n1, problem.n2);
    let n = problem.basis.len();
    let n12 = n1 + n2;
    if n12 >= n {
        return Err(Error::Dimension(format!("N1 + N2 = {n12} leaves nothing of N = {n}")));
    }
    let deg = max_degree(&problem.basis);
    let coeff = Matrix::from_fn(n, deg + 1, |r, c| problem.basis[r].coeff(c));
    if coeff.rank(crate::tolerances::FLOAT_RESIDUAL) < n {
        return Err(Error::DependentBasis);
    }
    let mut basis = problem.basis.clone();
    if let Some(m12) = &problem.inner_12 {
        let mom = moments::<T>(m12, 2 * deg)?;
        let gram = mom.gram(&basis[..n12], "E1 + E2")?;
        let res = gram_schmidt(&gram, &vec![T::one(); n12])?;
        for c in n1..n12 {
            basis[c] = combine(&res.vector(c), &basis[..=c]);
        }
    }
    let m13 = moments::<T>(&problem.inner_13, 2 * deg)?;
    let m23 = moments::<T>(&problem.inner_23, 2 * deg)?;
    let g13 = m13.gram(&basis, "(,)_13")?.entries;
    let g23 = m23.gram(&basis, "(,)_23")?.entries;
    let row = |j: usize, k: usize| {
        if j < n1 {
            g13[(j, k)].clone()
        } else {
            g23[(j, k)].clone()
        }
    };
    let g = Matrix::from_fn(n12, n12, row);
    let (rank, svd_gap) = rank_with_gap(&g);
    if rank < n1.max(n2) || rank > n12 {
        return Err(Error::DependentBasis);
    }
    let mut aug_rank = rank;
    let mut particular = Vec::new();
    let mut consistent = true;
    let tol = if T::is_exact() { 0.0 } else { SVD_GAP };
    for c in 0..n - n12 {
        let col = n12 + c;
        let aug = Matrix::from_fn(n12, n12 + 1, |j, k| {
            if k < n12 {
                g[(j, k)].clone()
            } else {
                -row(j, col)
            }
        });
        let (r_aug, _) = rank_with_gap(&aug);
        aug_rank = aug_rank.max(r_aug);
        if r_aug > rank {
            consistent = false;
            continue;
        }
        let (red, pivots) = aug.rref(tol);
        let mut coeffs = vec![T::zero(); n12];
        for (r, &p) in pivots.iter().enumerate() {
            if p < n12 {
                coeffs[p] = red[(r, n12)].clone();
            }
        }
        particular.push(&combine(&coeffs, &basis[..n12]) + &basis[col]);
    }
    let classification = if !consistent {
        Classification::NoSolution
    } else if rank == n12 {
        Classification::Unique
    } else {
        Classification::Family(n12 - rank)
    };
    let kernel = if matches!(classification, Classification::Family(_)) {
        let (red, pivots) = g.rref(tol);
        kernel_from_rref(&red, &pivots, n12)
            .iter()
            .map(|v| combine(v, &basis[..n12]))
            .collect()
    } else {
        Vec::new()
    };
    Ok(ThirdSubspaceSolution {
        classification,
        e2: basis[n1..n12].to_vec(),
        basis: if consistent { particular } else { Vec::new() },
        kernel,
        ranks: (rank, aug_rank),
        svd_gap,
    })
}

impl<T: Scalar> ThirdSubspaceSolution<T> {
    pub fn to_json(&self) -> Value {
        let polys = |v: &[Polynomial<T>]| v.iter().map(Polynomial::to_json).collect::<Vec<_>>();
        let mut out = json!({
            "classification": self.classification.to_string(),
            "ranks": [self.ranks.0, self.ranks.1],
            "e2": polys(&self.e2),
        });
        match self.classification {
            Classification::Unique => out["basis"] = polys(&self.basis).into(),
            Classification::Family(_) => {
                out["family"] = json!({"particular": polys(&self.basis), "kernel": polys(&self.kernel)})
            }
            Classification::NoSolution => {}
        }
        if let Some(gap) = self.svd_gap {
            out["svd_gap"] = gap.into();
        }
        out
    }
}

fn gamma_weight(z: &Rational) -> Result<Measure> {
    Measure::gamma(Rational::from_i64(1), z.clone())
}

fn monomials(n: usize) -> Vec<Polynomial<Rational>> {
    (0..n).map(Polynomial::monomial).collect()
}

/// The two-by-two system for the degree-two polynomial `x^2 + a12 x + a02`
/// with `E_1 = span{1}`, `E_2 = span{x + a01}` and weights `x^{z-1} e^{-x}`,
/// in closed form: `[[1, z13], [z23 + a01, z23 (z23 + 1 + a01)]] (a02, a12)
/// = -(z13 (z13 + 1), z23 (z23 + 1) (z23 + 2 + a01))`.
pub fn laguerre_closed_form_system(
    a01: &Rational,
    z13: &Rational,
    z23: &Rational,
) -> (Matrix<Rational>, Vec<Rational>) {
    let one = Rational::from_i64(1);
    let two = Rational::from_i64(2);
    let m = Matrix::from_rows(vec![
        vec![one.clone(), z13.clone()],
        vec![z23 + a01, z23 * (z23 + &one + a01)],
    ]);
    let rhs = vec![
        -(z13 * (z13 + &one)),
        -(z23 * (z23 + &one) * (z23 + &two + a01)),
    ];
    (m, rhs)
}

fn classify_closed_form(m: &Matrix<Rational>, rhs: &[Rational]) -> Classification {
    let r = m.rank(0.0);
    let aug = Matrix::from_fn(2, 3, |j, k| if k < 2 { m[(j, k)].clone() } else { rhs[j].clone() });
    if aug.rank(0.0) > r {
        Classification::NoSolution
    } else if r == 2 {
        Classification::Unique
    } else {
        Classification::Family(2 - r)
    }
}

/// `N1 = N2 = 1`, `N = 3` with gamma weights of parameters `z12, z23, z13`.
/// The general solver's answer is checked against the closed-form system.
pub fn gamma_three_subspace(
    z12: &Rational,
    z23: &Rational,
    z13: &Rational,
) -> Result<ThirdSubspaceSolution<Rational>> {
    let problem = ThreeSubspaceProblem {
        n1: 1,
        n2: 1,
        basis: monomials(3),
        inner_13: gamma_weight(z13)?,
        inner_23: gamma_weight(z23)?,
        inner_12: Some(gamma_weight(z12)?),
    };
    let sol = solve_third_subspace(&problem)?;
    let a01 = -z12.clone();
    if sol.e2[0] != Polynomial::new(vec![a01.clone(), Rational::from_i64(1)]) {
        return Err(Error::OracleMismatch("E_2 basis differs from x - z12".into()));
    }
    let (m, rhs) = laguerre_closed_form_system(&a01, z13, z23);
    if classify_closed_form(&m, &rhs) != sol.classification {
        return Err(Error::OracleMismatch(
            "closed-form system classifies differently".into(),
        ));
    }
    Ok(sol)
}

/// As [`gamma_three_subspace`] but with an even weight for `(,)_{12}`, so
/// that `a01 = 0`.
pub fn gamma_three_subspace_even12(
    inner_12: Measure,
    z23: &Rational,
    z13: &Rational,
) -> Result<ThirdSubspaceSolution<Rational>> {
    if !inner_12.symmetric() {
        return Err(Error::NotSymmetric);
    }
    let problem = ThreeSubspaceProblem {
        n1: 1,
        n2: 1,
        basis: monomials(3),
        inner_13: gamma_weight(z13)?,
        inner_23: gamma_weight(z23)?,
        inner_12: Some(inner_12),
    };
    let sol = solve_third_subspace(&problem)?;
    let (m, rhs) = laguerre_closed_form_system(&Rational::from_i64(0), z13, z23);
    if classify_closed_form(&m, &rhs) != sol.classification {
        return Err(Error::OracleMismatch(
            "closed-form system classifies differently".into(),
        ));
    }
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommonComplement<T> {
    pub dimension: usize,
    pub basis: Vec<Polynomial<T>>,
    /// Rank of the `u_j`, the `E_1` components of the second complement's basis.
    pub rank_u: usize,
}

/// Basis of the complement of `span(constraints)` in `P_N` under one measure.
fn complement_basis<T: Scalar>(
    mom: &MomentSequence<T>,
    constraints: &[Polynomial<T>],
    n: usize,
) -> Result<Vec<Polynomial<T>>> {
    let n1 = constraints.len();
    let ones = vec![T::one(); n];
    let mut basis = constraints.to_vec();
    if gram_schmidt(&mom.gram(&basis, "constraints")?, &ones).is_err() {
        return Err(Error::DependentBasis);
    }
    for deg in 0..n {
        if basis.len() == n {
            break;
        }
        basis.push(Polynomial::monomial(deg));
        if gram_schmidt(&mom.gram(&basis, "completion")?, &ones).is_err() {
            basis.pop();
        }
    }
    let res = gram_schmidt(&mom.gram(&basis, "completed")?, &ones)?;
    Ok((n1..n).map(|c| combine(&res.vector(c), &basis[..=c])).collect())
}

/// Polynomials orthogonal to the subspace under both measures. With `eps'_j`
/// a basis of the second complement and `u_j` its component in the subspace
/// under the first measure, the intersection is `{sum a_j eps'_j : sum a_j u_j = 0}`.
pub fn common_orthogonal_complement<T: Scalar>(
    constraints: &[Polynomial<T>],
    measure_a: &Measure,
    measure_b: &Measure,
    n: usize,
) -> Result<CommonComplement<T>> {
    let n1 = constraints.len();
    if n1 >= n {
        return Err(Error::Dimension(format!("subspace of dimension {n1} in P_{n}")));
    }
    if constraints.iter().any(|p| p.degree().is_none_or(|d| d >= n)) {
        return Err(Error::DependentBasis);
    }
    let ma = moments::<T>(measure_a, 2 * (n - 1))?;
    let mb = moments::<T>(measure_b, 2 * (n - 1))?;
    let eps_b = complement_basis(&mb, constraints, n)?;
    let ga = ma.gram(constraints, "constraints")?.entries;
    // u_j in constraint coordinates
    let u: Vec<Vec<T>> = eps_b
        .iter()
        .map(|e| {
            let rhs: Vec<T> = constraints.iter().map(|c| ma.inner(c, e)).collect::<Result<_>>()?;
            ga.solve(&rhs)
        })
        .collect::<Result<_>>()?;
    let d = n - n1;
    let umat = Matrix::from_fn(n1, d, |r, c| u[c][r].clone());
    let tol = if T::is_exact() { 0.0 } else { SVD_GAP };
    let (rank_u, _) = rank_with_gap(&umat);
    if rank_u > n1.min(d) {
        return Err(Error::DependentBasis);
    }
    let (red, pivots) = umat.rref(tol);
    let basis: Vec<Polynomial<T>> = kernel_from_rref(&red, &pivots, d)
        .iter()
        .map(|a| combine(a, &eps_b))
        .collect();
    Ok(CommonComplement {
        dimension: d - rank_u,
        basis,
        rank_u,
    })
}
