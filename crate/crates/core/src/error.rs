use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// `[X,Z] + I` is numerically zero, so the pair has rank zero instead of one.
    #[error("commutator defect matrix has rank zero (sigma_1 = {sigma1:e})")]
    RankZero { sigma1: f64 },

    #[error("matrix is not rank one: singular values {singular_values:?}")]
    NotRankOne { singular_values: Vec<f64> },

    /// The adjugate of a singular matrix vanishes when its rank is at most n-2.
    #[error("vanishing adjugate: matrix rank is at most n-2 (|adj| = {norm:e})")]
    VanishingAdjugate { norm: f64 },

    #[error("matrix is not numerically singular (|det| / scale^n = {ratio:e})")]
    NotSingular { ratio: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    /// A pole of a resolvent sits on (or too close to) the spectrum of Z or X.
    #[error("spectral collision for {term}: {point} is {distance:e} from the spectrum")]
    SpectralCollision {
        term: String,
        point: Complex64,
        distance: f64,
    },

    #[error("lattice spacing eta must be nonzero")]
    ZeroEta,

    #[error("coincident positions {i} and {j}")]
    CoincidentPositions { i: usize, j: usize },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("interpolation residual {residual:e} exceeds tolerance {tol:e}")]
    Conditioning { residual: f64, tol: f64 },

    #[error("{0} is not a root of tau (|tau| = {1:e})")]
    InconsistentRoot(Complex64, f64),

    /// A symmetry action produced a pair that no longer passes validation.
    #[error("internal consistency failure after symmetry action: {0}")]
    Consistency(String),
}
