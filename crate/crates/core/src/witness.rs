//! Outer-product factorizations of rank-one matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{frobenius, ComplexMatrix};
use crate::tolerance::Tolerances;

/// A pair of vectors with `left * right^T` equal to a rank-one matrix.
///
/// Used for `(e, f)` factoring `[X,Z] + I` and for `(v, w)` factoring
/// `adj(X)` when `det X = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneWitness {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl RankOneWitness {
    pub fn outer(&self) -> DMatrix<Complex64> {
        let n = self.left.len();
        DMatrix::from_fn(n, n, |i, j| self.left[i] * self.right[j])
    }

    /// Moves the scale `c` from one side to the other: `(c * left, right / c)`.
    /// The outer product is unchanged.
    pub fn regauged(&self, c: Complex64) -> Self {
        Self {
            left: self.left.iter().map(|z| z * c).collect(),
            right: self.right.iter().map(|z| z / c).collect(),
        }
    }

    /// Relative Frobenius error of the outer product against `m`.
    pub fn reconstruction_error(&self, m: &ComplexMatrix) -> f64 {
        let scale = m.frobenius_norm();
        let diff = frobenius(&(self.outer() - m.inner()));
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

/// Factors a numerically rank-one matrix.
///
/// Gauge: `left = sigma_1 u_1`, `right = conj(v_1)` from the dominant singular
/// triple, then both rotated by a unit phase so the largest-magnitude entry of
/// `right` is real and positive (first such index on ties).
pub fn extract_rank_one_witness(r: &ComplexMatrix, tol: f64) -> Result<RankOneWitness> {
    let sv = r.singular_values();
    let sigma1 = sv[0];
    if sigma1 == 0.0 || !(sigma1.is_finite()) {
        return Err(Error::RankZero { sigma1 });
    }
    let sigma2 = sv.get(1).copied().unwrap_or(0.0);
    if sigma2 > tol * sigma1 {
        return Err(Error::NotRankOne { singular_values: sv });
    }

    let triple = r.dominant_triple();
    let mut left: Vec<Complex64> = triple.left.iter().map(|z| z * triple.sigma).collect();
    let mut right: Vec<Complex64> = triple.right.iter().map(|z| z.conj()).collect();

    let (k, _) = right
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let phase = right[k] / right[k].norm();
    for z in right.iter_mut() {
        *z /= phase;
    }
    right[k] = Complex64::new(right[k].re, 0.0);
    for z in left.iter_mut() {
        *z *= phase;
    }

    let witness = RankOneWitness { left, right };
    if witness.reconstruction_error(r) > tol {
        return Err(Error::NotRankOne { singular_values: sv });
    }
    Ok(witness)
}

/// Factors `adj(X) = v w^T` for a numerically singular `X`; returns `(v, w)`
/// as `(left, right)`.
pub fn adjugate_witness(x: &ComplexMatrix, tol: &Tolerances) -> Result<RankOneWitness> {
    let n = x.n();
    let sigma1 = x.singular_values()[0];
    if n > 1 && sigma1 > 0.0 {
        let ratio = x.determinant().norm() / sigma1.powi(n as i32);
        if ratio > tol.singular {
            return Err(Error::NotSingular { ratio });
        }
    }
    let adj = x.adjugate();
    let norm = adj.frobenius_norm();
    // sigma_1(adj X) = product of the n-1 largest singular values of X, so a
    // rank <= n-2 matrix has an adjugate that is tiny against sigma_1(X)^{n-1}.
    let reference = sigma1.powi(n as i32 - 1);
    if n > 1 && norm <= tol.singular * reference {
        return Err(Error::VanishingAdjugate { norm });
    }
    extract_rank_one_witness(&adj, tol.rank_one)
}
