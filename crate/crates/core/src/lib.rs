//! Matrix pairs with `rank([X,Z] + I) = 1`, their tau functions in Miwa
//! variables, and rational nested Bethe ansatz solutions obtained as
//! eigenvalues of a linear matrix flow.

pub mod error;
pub mod flow;
pub mod matrix;
pub mod pair;
pub mod sampling;
pub mod scalar;
pub mod symmetry;
pub mod tau;
pub mod tolerance;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use flow::{flow_matrix, match_multisets, run_trajectory, step_matrix, Trajectory};
pub use matrix::ComplexMatrix;
pub use pair::{
    cm_pair_from_positions, inspect_pair, basic_2x2_pair, validate_pair, CMPair, PairFile, PairStatus,
    ValidationReport,
};
pub use scalar::{evaluate_pq, PqValues, ScalarData};
pub use symmetry::{apply_symmetry, RationalFn, SymmetryOp};
pub use tau::{
    closed_form_2x2, compare_closed_form_2x2, tau_miwa, tau_miwa_matrices, tau_polynomial, tau_roots, tau_section,
    ClosedFormDiscrepancy, LatticeSection, MiwaPoint, SectionEvaluator, TauPolynomial,
};
pub use tolerance::Tolerances;
pub use verify::{
    check_factorization, check_hirota_ratio, check_lemma1, check_rnba, Identity, ResidualReport, Sign, Status,
};
pub use witness::{adjugate_witness, extract_rank_one_witness, RankOneWitness};

pub use num_complex::Complex64;
