//! Matrix pairs on the completed Calogero-Moser phase space: `rank([X,Z] + I) = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// A validated pair `(X, Z)`. Only obtainable through [`validate_pair`] (or
/// constructors that call it), so consumers may assume the defect bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CMPair {
    x: ComplexMatrix,
    z: ComplexMatrix,
    defect: f64,
}

/// Wire form `{"X": matrix, "Z": matrix}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    #[serde(rename = "X")]
    pub x: ComplexMatrix,
    #[serde(rename = "Z")]
    pub z: ComplexMatrix,
}

impl CMPair {
    pub fn x(&self) -> &ComplexMatrix {
        &self.x
    }

    pub fn z(&self) -> &ComplexMatrix {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// `sigma_2 / max(sigma_1, 1)` of `[X,Z] + I`.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// `[X,Z] + I = XZ - ZX + I`.
    pub fn commutator_defect(&self) -> ComplexMatrix {
        commutator_plus_identity(&self.x, &self.z)
    }

    pub fn to_file(&self) -> PairFile {
        PairFile {
            x: self.x.clone(),
            z: self.z.clone(),
        }
    }

    /// Same `Z`, new `X`, re-validated.
    pub fn with_x(&self, x: ComplexMatrix, tol: f64) -> Result<Self> {
        validate_pair(&x, &self.z, tol)
    }
}

impl From<CMPair> for PairFile {
    fn from(p: CMPair) -> Self {
        PairFile { x: p.x, z: p.z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    Accepted,
    /// `[X, Z] + I` vanishes.
    RankZero,
    /// Second singular value above tolerance.
    HigherRank,
}

/// Full outcome of checking the commutator condition, accepted or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub singular_values: Vec<f64>,
    pub defect: f64,
    pub tol: f64,
    pub status: PairStatus,
}

pub fn commutator_plus_identity(x: &ComplexMatrix, z: &ComplexMatrix) -> ComplexMatrix {
    let (x, z) = (x.inner(), z.inner());
    let n = x.nrows();
    let r = x * z - z * x + DMatrix::<Complex64>::identity(n, n);
    ComplexMatrix::from_inner(r).expect("finite inputs give a finite commutator")
}

/// Singular values of `[X,Z] + I` and the accept/reject verdict.
pub fn inspect_pair(x: &ComplexMatrix, z: &ComplexMatrix, tol: f64) -> Result<ValidationReport> {
    if x.n() != z.n() {
        return Err(Error::Dimension {
            expected: x.n(),
            found: z.n(),
        });
    }
    let r = commutator_plus_identity(x, z);
    let sv = r.singular_values();
    let sigma1 = sv[0];
    let sigma2 = sv.get(1).copied().unwrap_or(0.0);
    let defect = sigma2 / sigma1.max(1.0);
    let status = if sigma1 <= tol {
        PairStatus::RankZero
    } else if sigma2 <= tol * sigma1.max(1.0) {
        PairStatus::Accepted
    } else {
        PairStatus::HigherRank
    };
    Ok(ValidationReport {
        n: x.n(),
        singular_values: sv,
        defect,
        tol,
        status,
    })
}

pub fn validate_pair(x: &ComplexMatrix, z: &ComplexMatrix, tol: f64) -> Result<CMPair> {
    let report = inspect_pair(x, z, tol)?;
    match report.status {
        PairStatus::Accepted => Ok(CMPair {
            x: x.clone(),
            z: z.clone(),
            defect: report.defect,
        }),
        PairStatus::RankZero => Err(Error::RankZero {
            sigma1: report.singular_values[0],
        }),
        PairStatus::HigherRank => Err(Error::NotRankOne {
            singular_values: report.singular_values,
        }),
    }
}

/// The classical Calogero-Moser pair: `X = diag(x)`, `Z_jj = p_j`,
/// `Z_jk = 1 / (x_j - x_k)`.
pub fn cm_pair_from_positions(
    positions: &[Complex64],
    momenta: &[Complex64],
    separation: f64,
    tol: f64,
) -> Result<CMPair> {
    let n = positions.len();
    if n == 0 {
        return Err(Error::Input("at least one position is required".into()));
    }
    if momenta.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: momenta.len(),
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (positions[i] - positions[j]).norm() <= separation {
                return Err(Error::CoincidentPositions { i, j });
            }
        }
    }
    let x = ComplexMatrix::diagonal(positions);
    let z = ComplexMatrix::from_inner(DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            momenta[j]
        } else {
            Complex64::new(1.0, 0.0) / (positions[j] - positions[k])
        }
    }))?;
    validate_pair(&x, &z, tol)
}

/// `X = [[0,1],[0,0]]`, `Z = [[0,0],[1,0]]`: the smallest nontrivial example.
pub fn basic_2x2_pair() -> CMPair {
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).expect("static");
    let z = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).expect("static");
    validate_pair(&x, &z, 1e-12).expect("nilpotent pair satisfies the commutator condition")
}
