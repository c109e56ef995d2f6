use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by validation, extraction and identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative second singular value accepted as "rank one".
    pub rank_one: f64,
    /// `|det M| <= singular * sigma_1(M)^n` counts as singular.
    pub singular: f64,
    /// Minimum distance of a resolvent pole from the spectrum, relative to `max(1, spectral radius)`.
    pub spectral: f64,
    /// Relative residual at which an identity check passes.
    pub check: f64,
    /// Magnitudes below `floor * scale` are treated as zero.
    pub floor: f64,
    /// `|tau(root)| <= root * max|tau|` on the interpolation circle.
    pub root: f64,
    /// Minimum pairwise distance between Calogero-Moser positions.
    pub separation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_one: 1e-10,
            singular: 1e-9,
            spectral: 1e-8,
            check: 1e-7,
            floor: 1e-12,
            root: 1e-7,
            separation: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn with_check(self, check: f64) -> Self {
        Self { check, ..self }
    }

    pub fn with_rank_one(self, rank_one: f64) -> Self {
        Self { rank_one, ..self }
    }
}
