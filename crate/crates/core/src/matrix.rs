//! Dense complex square matrices and the linear-algebra kernels built on them.
//!
//! Everything downstream (pairs, tau functions, flows) works with
//! [`ComplexMatrix`], a square `DMatrix<Complex64>` whose entries are all
//! finite. LU, SVD and Schur factorizations come from nalgebra; the adjugate
//! is computed here with the Faddeev-LeVerrier trace recursion so that it
//! stays valid for exactly singular input.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix(DMatrix<Complex64>);

/// Wire form: `{"n": int, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.n {
            return Err(Error::Dimension {
                expected: repr.n,
                found: repr.entries.len(),
            });
        }
        let rows = repr
            .entries
            .iter()
            .map(|row| {
                if row.len() != repr.n {
                    return Err(Error::Dimension {
                        expected: repr.n,
                        found: row.len(),
                    });
                }
                Ok(row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        ComplexMatrix::from_rows(&rows)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        let n = m.n();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| [m.0[(i, j)].re, m.0[(i, j)].im]).collect())
            .collect();
        MatrixRepr { n, entries }
    }
}

const POWER_ITERATIONS: usize = 500;

/// Dominant singular triple `(sigma_1, u_1, v_1)` with `M ~ sigma_1 u_1 v_1^H`.
#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub sigma: f64,
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::Input("matrix dimension must be positive".into()));
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(inner))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Convenience constructor for real-valued test and catalog matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let n = d.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Wraps the result of an arithmetic expression on inner matrices.
    /// Finiteness is re-checked.
    pub fn from_inner(inner: DMatrix<Complex64>) -> Result<Self> {
        Self::new(inner)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Product of row norms; an upper bound for `|det|` and the natural
    /// scale against which a computed determinant is "numerically zero".
    pub fn hadamard_bound(&self) -> f64 {
        self.0.row_iter().map(|r| frobenius_row(r.iter())).product()
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().lu().determinant()
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.0.clone().try_inverse().map(Self).ok_or(Error::Singular)
    }

    /// Solves `self * Y = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        self.0.clone().lu().solve(rhs).ok_or(Error::Singular)
    }

    /// `(point * I - self)^{-1}` via a linear solve against the identity.
    pub fn resolvent(&self, point: Complex64) -> Result<Self> {
        let n = self.n();
        let shifted = DMatrix::identity(n, n) * point - &self.0;
        let inv = shifted
            .lu()
            .solve(&DMatrix::identity(n, n))
            .ok_or(Error::Singular)?;
        Self::new(inv)
    }

    /// `point * I - self`.
    pub fn shifted_negation(&self, point: Complex64) -> Self {
        let n = self.n();
        Self(DMatrix::identity(n, n) * point - &self.0)
    }

    /// Singular values in non-increasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.0.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Dominant singular triple by power iteration on `A^H A`, seeded with the
    /// largest row of `A`. Converges in one step for exact rank one; in general
    /// at rate `(sigma_2 / sigma_1)^2`.
    pub fn dominant_triple(&self) -> SingularTriple {
        let a = &self.0;
        let n = self.n();
        let ah = a.adjoint();
        let row = (0..n)
            .max_by(|&i, &j| a.row(i).norm().total_cmp(&a.row(j).norm()))
            .unwrap_or(0);
        let mut v: DVector<Complex64> = a.row(row).adjoint();
        let norm = v.norm();
        if norm == 0.0 {
            let mut e = DVector::zeros(n);
            e[0] = Complex64::new(1.0, 0.0);
            return SingularTriple {
                sigma: 0.0,
                left: e.iter().copied().collect(),
                right: e.iter().copied().collect(),
            };
        }
        v /= Complex64::new(norm, 0.0);
        for _ in 0..POWER_ITERATIONS {
            let mut next = &ah * (a * &v);
            let len = next.norm();
            if len == 0.0 {
                break;
            }
            next /= Complex64::new(len, 0.0);
            // Eigenvector phase is free; compare up to it.
            let overlap = v.dotc(&next);
            let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
            let change = (&next - &v * phase).norm();
            v = next;
            if change <= 4.0 * f64::EPSILON {
                break;
            }
        }
        let av = a * &v;
        let sigma = av.norm();
        let u = if sigma > 0.0 { av / Complex64::new(sigma, 0.0) } else { av };
        SingularTriple {
            sigma,
            left: u.iter().copied().collect(),
            right: v.iter().copied().collect(),
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = self
            .0
            .clone()
            .try_schur(f64::EPSILON, 100_000)
            .ok_or(Error::NoConvergence)?;
        let (_, t) = schur.unpack();
        Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
    }

    /// Smallest distance from `point` to the spectrum.
    pub fn spectral_distance(&self, point: Complex64) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|ev| (ev - point).norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// Matrix of cofactors, valid for singular input.
    pub fn adjugate(&self) -> Self {
        faddeev_leverrier(&self.0).1
    }

    /// Coefficients `c_0..c_n` (ascending) of `det(t I - self)`.
    pub fn characteristic_polynomial(&self) -> Vec<Complex64> {
        faddeev_leverrier(&self.0).0
    }
}

/// Trace recursion: `N_1 = I`, `c_{n-k} = -tr(A N_k) / k`,
/// `N_{k+1} = A N_k + c_{n-k} I`. Then `adj(A) = (-1)^{n-1} N_n`.
///
/// The input is first scaled by a power of two near `1/max|a_ij|` so the
/// recursion runs on O(1) entries; power-of-two scaling is exact.
fn faddeev_leverrier(a: &DMatrix<Complex64>) -> (Vec<Complex64>, ComplexMatrix) {
    let n = a.nrows();
    let max_abs = a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let exponent = if max_abs > 0.0 { -max_abs.log2().round() as i32 } else { 0 };
    let s = 2.0_f64.powi(exponent);
    let a_s = a * Complex64::new(s, 0.0);

    let eye = DMatrix::<Complex64>::identity(n, n);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut nk = eye.clone();
    for k in 1..=n {
        let ank = &a_s * &nk;
        let c = -ank.trace() / k as f64;
        coeffs[n - k] = c;
        if k < n {
            nk = ank + &eye * c;
        }
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    // adj(A_s) = s^{n-1} adj(A).
    let unscale_adj = 2.0_f64.powi(-exponent * (n as i32 - 1));
    let adj = nk * Complex64::new(sign * unscale_adj, 0.0);
    // det(t - A) = s^{-n} det(s t - A_s): coefficient k scales by s^{k-n}.
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c *= 2.0_f64.powi(exponent * (k as i32 - n as i32));
    }
    (coeffs, ComplexMatrix(adj))
}

/// Errors when `point` lies within `rel_tol * max(1, spectral radius)` of an
/// eigenvalue in `spectrum`.
pub fn ensure_off_spectrum(spectrum: &[Complex64], point: Complex64, rel_tol: f64, term: &str) -> Result<()> {
    let radius = spectrum.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let distance = spectrum
        .iter()
        .map(|ev| (ev - point).norm())
        .fold(f64::INFINITY, f64::min);
    if distance <= rel_tol * radius {
        return Err(Error::SpectralCollision {
            term: term.to_string(),
            point,
            distance,
        });
    }
    Ok(())
}

pub(crate) fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    frobenius_row(m.iter())
}

fn frobenius_row<'a>(it: impl Iterator<Item = &'a Complex64>) -> f64 {
    it.map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    frobenius_row(v.iter())
}

/// Bilinear (not sesquilinear) product `a^T b`.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a^T M b`.
pub(crate) fn bilinear(a: &[Complex64], m: &ComplexMatrix, b: &[Complex64]) -> Complex64 {
    let n = m.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += m.get(i, j) * b[j];
        }
        acc += a[i] * row;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn adjugate_of_identity_is_identity() {
        let eye = ComplexMatrix::identity(3);
        assert_eq!(eye.adjugate(), eye);
    }

    #[test]
    fn adjugate_two_by_two_cofactor_formula() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(m.adjugate(), expected);
    }

    #[test]
    fn adjugate_one_by_one_is_one() {
        let m = ComplexMatrix::from_rows(&[vec![c(3.0, -2.0)]]).unwrap();
        assert_eq!(m.adjugate().get(0, 0), c(1.0, 0.0));
        let z = ComplexMatrix::zeros(1);
        assert_eq!(z.adjugate().get(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn adjugate_of_rank_deficient_diagonal_vanishes() {
        let m = ComplexMatrix::diagonal(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(m.adjugate().max_abs(), 0.0);
    }

    #[test]
    fn adjugate_of_large_entries_stays_accurate() {
        let m = ComplexMatrix::from_real_rows(&[
            &[1e6, 2e6, 0.0],
            &[0.0, 3e6, 1e6],
            &[4e6, 0.0, 5e6],
        ])
        .unwrap();
        let prod = m.inner() * m.adjugate().inner();
        let det = m.determinant();
        let resid = frobenius(&(prod - DMatrix::identity(3, 3) * det));
        assert!(resid <= 1e-12 * det.norm(), "resid {resid}");
    }

    #[test]
    fn characteristic_polynomial_matches_determinant() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.5, 0.0), c(-1.0, 0.5)],
        ])
        .unwrap();
        let cp = m.characteristic_polynomial();
        // c_0 = det(-M) = det(M) for n = 2.
        assert!((cp[0] - m.determinant()).norm() < 1e-14);
        assert!((cp[1] + m.trace()).norm() < 1e-14);
        assert_eq!(cp[2], c(1.0, 0.0));
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        let r = ComplexMatrix::new(DMatrix::zeros(2, 3));
        assert!(matches!(r, Err(Error::NotSquare { rows: 2, cols: 3 })));
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(ComplexMatrix::new(m), Err(Error::NonFinite { row: 1, col: 0 })));
    }

    #[test]
    fn json_round_trip_and_dimension_errors() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.0, -1.0)],
            vec![c(3.5, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[[[1.0,2.0],[0.0,-1.0]],[[3.5,0.0],[0.0,0.0]]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"n":2,"entries":[[[1,0],[0,0]]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn singular_values_sorted_and_dominant_triple_reconstructs() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(m.singular_values(), vec![2.0, 0.0]);
        let t = m.dominant_triple();
        assert!((t.sigma - 2.0).abs() < 1e-15);
        let recon = t.left[0] * t.sigma * t.right[0].conj();
        assert!((recon - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dominant_triple_of_complex_rank_one() {
        let a = [c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1)];
        let b = [c(1.0, 1.0), c(0.0, -0.4), c(0.25, 3.0)];
        let m = ComplexMatrix::from_inner(DMatrix::from_fn(3, 3, |i, j| a[i] * b[j])).unwrap();
        let t = m.dominant_triple();
        assert!((t.sigma - m.singular_values()[0]).abs() < 1e-13 * t.sigma);
        for i in 0..3 {
            for j in 0..3 {
                let recon = t.left[i] * t.sigma * t.right[j].conj();
                assert!((recon - m.get(i, j)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dominant_triple_matches_largest_singular_value() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(-0.3, 0.0), c(0.2, 0.9)],
            vec![c(0.0, -1.0), c(2.0, 0.1), c(0.4, 0.0)],
            vec![c(0.7, 0.7), c(0.1, -0.2), c(-1.5, 0.3)],
        ])
        .unwrap();
        let t = m.dominant_triple();
        assert!((t.sigma - m.singular_values()[0]).abs() < 1e-12);
    }

    #[test]
    fn resolvent_of_nilpotent() {
        let z = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        let lam = c(2.0, 0.0);
        let r = z.resolvent(lam).unwrap();
        assert!((r.get(0, 0) - 0.5).norm() < 1e-15);
        assert!((r.get(1, 0) - 0.25).norm() < 1e-15);
        assert!(r.get(0, 1).norm() < 1e-15);
    }
}
