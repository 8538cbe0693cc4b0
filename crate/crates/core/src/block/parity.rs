use crate::error::{Error, Result};
use crate::gso::{checkerboard_det, gram_schmidt};
use crate::matrix::Matrix;
use crate::measures::{moments, Measure};
use crate::scalar::Scalar;
use crate::standard::{parity_split_build, Normalization};

use super::{assemble, gamma_matrix, RawSbo, SboBasis};

/// SBO polynomials of a symmetric pair, even and odd degrees orthogonalized
/// separately. `Z_{i;n}` is taken from the checkerboard factorization of the
/// leading `gamma` block. Returns monic polynomials.
pub fn sbo_parity_build<T: Scalar>(
    measure1: &Measure,
    measure2: &Measure,
    i: usize,
    n: usize,
) -> Result<SboBasis<T>> {
    if !measure1.symmetric() || !measure2.symmetric() {
        return Err(Error::NotSymmetric);
    }
    if i > n {
        return Err(Error::IndexOutOfRange(format!("i = {i} exceeds N = {n}")));
    }
    let q = parity_split_build::<T>(measure1, n, Normalization::Monic)?;
    let gamma = gamma_matrix(&q, measure2, i)?;
    let d = n - i;
    let mut a_hat = Matrix::zeros(d, d);
    let mut b_hat = Matrix::zeros(d, d);
    let mut h_hat = vec![T::zero(); d];
    for parity in 0..2 {
        // offsets c = deg - i of this parity's degrees
        let sector: Vec<usize> = (i..n).filter(|deg| deg % 2 == parity).map(|deg| deg - i).collect();
        let sub = crate::measures::GramMatrix {
            entries: gamma.entries.select(&sector, &sector),
            basis_label: format!("{} sector", if parity == 0 { "even" } else { "odd" }),
        };
        let factors: Vec<T> = sector.iter().map(|&c| q.k[i + c].clone()).collect();
        let res = gram_schmidt(&sub, &factors)?;
        for (col, &c) in sector.iter().enumerate() {
            for (row, &r) in sector.iter().enumerate().take(col + 1) {
                a_hat[(r, c)] = res.a[(row, col)].clone();
                b_hat[(r, c)] = res.b[(row, col)].clone();
            }
            h_hat[c] = res.h[col].clone();
        }
    }
    let mut z = vec![T::one()];
    for size in 1..=d {
        z.push(checkerboard_det(&gamma.entries.leading(size), false)?.0);
    }
    let moments2 = moments::<T>(measure2, 2 * n.saturating_sub(1))?;
    assemble(
        q,
        measure2.clone(),
        moments2,
        gamma,
        i,
        RawSbo {
            a_hat,
            b_hat,
            h_hat,
            z,
        },
        Normalization::Monic,
    )
}
