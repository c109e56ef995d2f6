//! The free flow `X(m) = -eta X (lambda1 - Z) - m eta (lambda2 - Z)^{-1} (lambda1 - Z)`
//! and root trajectories over integer time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ensure_off_spectrum, ComplexMatrix};
use crate::pair::CMPair;
use crate::tau::{tau_roots, LatticeSection};
use crate::tolerance::Tolerances;

/// `X(0) = -eta X (lambda1 - Z)` and `step = -eta (lambda2 - Z)^{-1} (lambda1 - Z)`.
fn flow_parts(pair: &CMPair, section: &LatticeSection, tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if section.eta.norm() == 0.0 {
        return Err(Error::ZeroEta);
    }
    let spectrum = pair.z().eigenvalues()?;
    ensure_off_spectrum(&spectrum, section.lambda2, tol.spectral, "lambda2")?;
    let a = pair.z().shifted_negation(section.lambda1);
    let r2 = pair.z().resolvent(section.lambda2)?;
    let minus_eta = -section.eta;
    let base = ComplexMatrix::from_inner(pair.x().inner() * a.inner() * minus_eta)?;
    let step = ComplexMatrix::from_inner(r2.inner() * a.inner() * minus_eta)?;
    Ok((base, step))
}

pub fn flow_matrix(pair: &CMPair, section: &LatticeSection, m: Complex64, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (base, step) = flow_parts(pair, section, tol)?;
    ComplexMatrix::from_inner(base.inner() + step.inner() * m)
}

/// The constant increment `X(m + 1) - X(m)`.
pub fn step_matrix(pair: &CMPair, section: &LatticeSection, tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(flow_parts(pair, section, tol)?.1)
}

/// Permutation `perm` minimizing `sum_i |a[i] - b[perm[i]]|`.
///
/// Solved exactly with the Hungarian algorithm. Columns are visited in
/// lexicographic `(re, im)` order of `b` (stable), so among equal-cost
/// assignments the lexicographically smaller `b` entry is taken first.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Result<Vec<usize>> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[i].re.total_cmp(&b[j].re).then(b[i].im.total_cmp(&b[j].im)));
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|ai| order.iter().map(|&j| (ai - b[j]).norm()).collect())
        .collect();
    let assignment = hungarian(&cost);
    Ok(assignment.into_iter().map(|col| order[col]).collect())
}

/// Square min-cost assignment; returns the column assigned to each row.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based potentials; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    assignment
}

/// Roots of `tau^m` over consecutive integer `m`, column-aligned by matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub section: LatticeSection,
    pub m_values: Vec<i64>,
    /// `roots[i][j]`: particle `j` at time `m_values[i]`.
    pub roots: Vec<Vec<Complex64>>,
    /// Total assignment distance between levels `i` and `i + 1`.
    pub match_cost: Vec<f64>,
    /// Steps where some particle moved more than `10 |eta|`; matching there
    /// may have swapped particles near a collision.
    pub flagged: Vec<bool>,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.roots.first().map_or(0, Vec::len)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.roots.iter().map(|level| level[j]).collect()
    }
}

pub fn run_trajectory(
    pair: &CMPair,
    section: &LatticeSection,
    m_from: i64,
    m_to: i64,
    tol: &Tolerances,
) -> Result<Trajectory> {
    if m_from > m_to {
        return Err(Error::Input(format!("m_from ({m_from}) exceeds m_to ({m_to})")));
    }
    let m_values: Vec<i64> = (m_from..=m_to).collect();
    let threshold = 10.0 * section.eta.norm();
    let mut roots: Vec<Vec<Complex64>> = Vec::with_capacity(m_values.len());
    let mut match_cost = Vec::new();
    let mut flagged = Vec::new();
    for &m in &m_values {
        let level = tau_roots(pair, section, Complex64::new(m as f64, 0.0), tol)?;
        let aligned = match roots.last() {
            None => level,
            Some(prev) => {
                let perm = match_multisets(prev, &level)?;
                let aligned: Vec<Complex64> = perm.iter().map(|&k| level[k]).collect();
                let dists: Vec<f64> = prev.iter().zip(&aligned).map(|(p, q)| (p - q).norm()).collect();
                match_cost.push(dists.iter().sum());
                flagged.push(dists.iter().any(|&d| d > threshold));
                aligned
            }
        };
        roots.push(aligned);
    }
    Ok(Trajectory {
        section: *section,
        m_values,
        roots,
        match_cost,
        flagged,
    })
}
