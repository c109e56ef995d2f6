//! The scalar data attached to a pair with `det X = 0`: the witnesses
//! `(e, f)` of `[X,Z] + I`, `(v, w)` of `adj X`, the constants
//! `gamma = w^T e`, `mu = f^T v`, and the polynomials
//! `p(lambda) = f^T adj(lambda I - Z) v`, `q(lambda) = w^T adj(lambda I - Z) e`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{bilinear, dot, vec_norm, ComplexMatrix};
use crate::pair::CMPair;
use crate::tolerance::Tolerances;
use crate::witness::{adjugate_witness, extract_rank_one_witness, RankOneWitness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarData {
    pub gamma: Complex64,
    pub mu: Complex64,
    /// `(e, f)` with `e f^T = [X,Z] + I`.
    pub commutator: RankOneWitness,
    /// `(v, w)` with `v w^T = adj X`.
    pub adjugate: RankOneWitness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqValues {
    pub p: Complex64,
    pub q: Complex64,
}

impl ScalarData {
    pub fn extract(pair: &CMPair, tol: &Tolerances) -> Result<Self> {
        let commutator = extract_rank_one_witness(&pair.commutator_defect(), tol.rank_one)?;
        let adjugate = adjugate_witness(pair.x(), tol)?;
        Ok(Self::from_witnesses(commutator, adjugate))
    }

    pub fn from_witnesses(commutator: RankOneWitness, adjugate: RankOneWitness) -> Self {
        let gamma = dot(&adjugate.right, &commutator.left);
        let mu = dot(&commutator.right, &adjugate.left);
        Self {
            gamma,
            mu,
            commutator,
            adjugate,
        }
    }

    /// Rescales `e -> c e, f -> f / c` and `v -> d v, w -> w / d`.
    /// `gamma * p` and `mu * q` are invariant.
    pub fn regauged(&self, c: Complex64, d: Complex64) -> Self {
        Self::from_witnesses(self.commutator.regauged(c), self.adjugate.regauged(d))
    }

    pub fn pq(&self, z: &ComplexMatrix, lambda: Complex64) -> PqValues {
        let adj = z.shifted_negation(lambda).adjugate();
        PqValues {
            p: bilinear(&self.commutator.right, &adj, &self.adjugate.left),
            q: bilinear(&self.adjugate.right, &adj, &self.commutator.left),
        }
    }

    /// Natural magnitude of `gamma * mu`: `|w||e||f||v|`. Gauge-invariant.
    pub fn gamma_mu_scale(&self) -> f64 {
        vec_norm(&self.commutator.left)
            * vec_norm(&self.commutator.right)
            * vec_norm(&self.adjugate.left)
            * vec_norm(&self.adjugate.right)
    }
}

/// `p(lambda)`, `q(lambda)` together with the scalar data they were built from.
pub fn evaluate_pq(pair: &CMPair, lambda: Complex64, tol: &Tolerances) -> Result<(PqValues, ScalarData)> {
    let scalars = ScalarData::extract(pair, tol)?;
    Ok((scalars.pq(pair.z(), lambda), scalars))
}
