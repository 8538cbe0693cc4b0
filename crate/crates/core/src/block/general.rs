use crate::error::{Error, Result};
use crate::gso::gram_schmidt;
use crate::matrix::Matrix;
use crate::measures::{moments, Measure};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::tolerances::FLOAT_MAX_N;

/// Polynomials spanning a constraint subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec<T> {
    pub basis_polys: Vec<Polynomial<T>>,
}

impl<T: Scalar> SubspaceSpec<T> {
    pub fn new(basis_polys: Vec<Polynomial<T>>) -> Self {
        Self { basis_polys }
    }

    /// `span{x^0, .., x^{i-1}}`.
    pub fn lower_degrees(i: usize) -> Self {
        Self::new((0..i).map(Polynomial::monomial).collect())
    }
}

/// Orthogonal basis of the complement of a general constraint subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBo<T> {
    /// Monic, sorted by degree, orthogonal under the second measure.
    pub phi: Vec<Polynomial<T>>,
    /// `(phi_k, phi_k)_2`.
    pub h: Vec<T>,
    /// Monomial degrees appended to complete the subspace basis.
    pub completion: Vec<usize>,
}

/// Completes the subspace basis with monomials, orthogonalizes under the
/// first measure, keeps the vectors past the subspace, brings them to a
/// reduced echelon form by degree and orthogonalizes those under the second
/// measure. The echelon step makes the output independent of the completion.
pub fn build_general_bo<T: Scalar>(
    measure1: &Measure,
    measure2: &Measure,
    subspace: &SubspaceSpec<T>,
    n: usize,
) -> Result<GeneralBo<T>> {
    if !T::is_exact() && n > FLOAT_MAX_N {
        return Err(Error::Conditioning {
            n,
            limit: FLOAT_MAX_N,
        });
    }
    let n1 = subspace.basis_polys.len();
    if n1 >= n {
        return Err(Error::Dimension(format!("subspace of dimension {n1} in P_{n}")));
    }
    if let Some(p) = subspace.basis_polys.iter().find(|p| p.degree().is_none_or(|d| d >= n)) {
        return Err(Error::Degree(format!("constraint {p} is not a nonzero polynomial of degree < {n}")));
    }
    let mom1 = moments::<T>(measure1, 2 * (n - 1))?;
    let mom2 = moments::<T>(measure2, 2 * (n - 1))?;
    let mut basis = subspace.basis_polys.clone();
    let ones = vec![T::one(); n];
    if gram_schmidt(&mom1.gram(&basis, "constraints")?, &ones).is_err() {
        return Err(Error::DependentConstraints);
    }
    let mut completion = Vec::new();
    for deg in 0..n {
        if basis.len() == n {
            break;
        }
        basis.push(Polynomial::monomial(deg));
        if gram_schmidt(&mom1.gram(&basis, "completion")?, &ones).is_ok() {
            completion.push(deg);
        } else {
            basis.pop();
        }
    }
    let first = gram_schmidt(&mom1.gram(&basis, "completed")?, &ones)?;
    // monomial coefficients of E_{n1}..E_{n-1}
    let rows: Vec<Polynomial<T>> = (n1..n)
        .map(|c| {
            let terms: Vec<(T, &Polynomial<T>)> =
                (0..=c).map(|r| (first.a[(r, c)].clone(), &basis[r])).collect();
            Polynomial::combine(&terms)
        })
        .collect();
    let echelon = degree_echelon(&rows, n)?;
    let second = gram_schmidt(&mom2.gram(&echelon, "echelon")?, &ones)?;
    let phi: Vec<Polynomial<T>> = (0..echelon.len())
        .map(|c| {
            let terms: Vec<(T, &Polynomial<T>)> =
                (0..=c).map(|r| (second.a[(r, c)].clone(), &echelon[r])).collect();
            Polynomial::combine(&terms)
        })
        .collect();
    Ok(GeneralBo {
        phi,
        h: second.h,
        completion,
    })
}

/// Reduced row echelon form with the highest degree as the first column:
/// monic polynomials of distinct degrees, each free of the other leading
/// degrees, sorted by degree.
fn degree_echelon<T: Scalar>(polys: &[Polynomial<T>], n: usize) -> Result<Vec<Polynomial<T>>> {
    let m = Matrix::from_fn(polys.len(), n, |r, c| polys[r].coeff(n - 1 - c));
    let (red, pivots) = m.rref(crate::tolerances::FLOAT_RESIDUAL);
    if pivots.len() != polys.len() {
        return Err(Error::DependentBasis);
    }
    let mut out: Vec<Polynomial<T>> = (0..pivots.len())
        .map(|r| Polynomial::new((0..n).map(|d| red[(r, n - 1 - d)].clone()).collect()))
        .collect();
    out.sort_by_key(|p| p.degree());
    Ok(out)
}
