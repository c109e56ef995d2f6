//! Symmetries of the phase space: commuting flows `X -> X + f(Z)`, dual flows
//! `Z -> Z + f(X)`, the transpose involution and simultaneous conjugation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ensure_off_spectrum, ComplexMatrix};
use crate::pair::{validate_pair, CMPair};
use crate::tolerance::Tolerances;

/// `f(t) = sum_k poly[k] t^k + sum_i residue_i / (pole_i - t)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RationalFn {
    pub poly: Vec<Complex64>,
    pub poles: Vec<(Complex64, Complex64)>,
}

impl RationalFn {
    pub fn constant(c: Complex64) -> Self {
        Self {
            poly: vec![c],
            poles: vec![],
        }
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self {
            poly: coeffs,
            poles: vec![],
        }
    }

    pub fn simple_pole(pole: Complex64, residue: Complex64) -> Self {
        Self {
            poly: vec![],
            poles: vec![(pole, residue)],
        }
    }

    /// Evaluates `f(M)`; every pole must be off the spectrum of `M`.
    pub fn eval(&self, m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
        let n = m.n();
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        for c in self.poly.iter().rev() {
            acc = &acc * m.inner() + DMatrix::identity(n, n) * *c;
        }
        if !self.poles.is_empty() {
            let spectrum = m.eigenvalues()?;
            for (i, &(pole, residue)) in self.poles.iter().enumerate() {
                ensure_off_spectrum(&spectrum, pole, tol.spectral, &format!("pole {i}"))?;
                acc += m.resolvent(pole)?.inner() * residue;
            }
        }
        ComplexMatrix::from_inner(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryOp {
    TranslateX(RationalFn),
    TranslateZ(RationalFn),
    /// `(X, Z) -> (X^T, Z^T)`. Since `tr([X,Z] + I) = n`, the image has
    /// `[X^T, Z^T] + I = 2I - ([X,Z] + I)^T` with eigenvalues `2 - n` and `2`,
    /// so it stays in the phase space only for `n <= 2`; larger images fail
    /// re-validation. Tau values are preserved regardless
    /// (see [`crate::tau::tau_miwa_matrices`]).
    Transpose,
    /// `(X, Z) -> (g X g^{-1}, g Z g^{-1})`.
    Conjugate(ComplexMatrix),
}

pub fn apply_symmetry(pair: &CMPair, op: &SymmetryOp, tol: &Tolerances) -> Result<CMPair> {
    let (x, z) = (pair.x(), pair.z());
    let (nx, nz) = match op {
        SymmetryOp::TranslateX(f) => {
            let shift = f.eval(z, tol)?;
            (ComplexMatrix::from_inner(x.inner() + shift.inner())?, z.clone())
        }
        SymmetryOp::TranslateZ(f) => {
            let shift = f.eval(x, tol)?;
            (x.clone(), ComplexMatrix::from_inner(z.inner() + shift.inner())?)
        }
        SymmetryOp::Transpose => (x.transpose(), z.transpose()),
        SymmetryOp::Conjugate(g) => {
            if g.n() != pair.n() {
                return Err(Error::Dimension {
                    expected: pair.n(),
                    found: g.n(),
                });
            }
            let gx = g.inner() * x.inner();
            let gz = g.inner() * z.inner();
            // (g M) g^{-1} solved as g^T Y^T = (g M)^T.
            let gt = g.transpose();
            let xt = gt.solve(&gx.transpose())?.transpose();
            let zt = gt.solve(&gz.transpose())?.transpose();
            (ComplexMatrix::from_inner(xt)?, ComplexMatrix::from_inner(zt)?)
        }
    };
    validate_pair(&nx, &nz, tol.rank_one).map_err(|e| Error::Consistency(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::{cm_pair_from_positions, basic_2x2_pair};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cauchy3() -> CMPair {
        cm_pair_from_positions(
            &[c(0.1, 0.2), c(-0.5, 0.3), c(0.4, -0.6)],
            &[c(0.3, 0.0), c(-1.0, 0.5), c(0.2, 0.2)],
            1e-12,
            1e-10,
        )
        .unwrap()
    }

    #[test]
    fn transpose_of_basic_pair() {
        let t = apply_symmetry(&basic_2x2_pair(), &SymmetryOp::Transpose, &Tolerances::default()).unwrap();
        assert_eq!(t.x(), &ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap());
        assert_eq!(t.z(), &ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap());
    }

    #[test]
    fn transpose_leaves_phase_space_from_three_particles() {
        let tol = Tolerances::default();
        let err = apply_symmetry(&cauchy3(), &SymmetryOp::Transpose, &tol).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
        let two = cm_pair_from_positions(&[c(0.0, 0.0), c(0.5, 0.5)], &[c(1.0, 0.0), c(0.0, -1.0)], 1e-12, 1e-10)
            .unwrap();
        assert!(apply_symmetry(&two, &SymmetryOp::Transpose, &tol).is_ok());
    }

    #[test]
    fn constant_translation_keeps_commutator() {
        let p = cauchy3();
        let shift = c(0.7, -0.2);
        let t = apply_symmetry(&p, &SymmetryOp::TranslateX(RationalFn::constant(shift)), &Tolerances::default())
            .unwrap();
        for i in 0..3 {
            assert_eq!(t.x().get(i, i), p.x().get(i, i) + shift);
        }
        let diff = t.commutator_defect().inner() - p.commutator_defect().inner();
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn dual_flow_with_square() {
        let p = cauchy3();
        let f = RationalFn::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let t = apply_symmetry(&p, &SymmetryOp::TranslateZ(f), &Tolerances::default()).unwrap();
        assert!(t.defect() <= 1e-10);
    }

    #[test]
    fn pole_on_spectrum_is_rejected() {
        let p = cauchy3();
        // Spectrum of X is its diagonal.
        let f = RationalFn::simple_pole(c(0.1, 0.2), c(1.0, 0.0));
        let err = apply_symmetry(&p, &SymmetryOp::TranslateZ(f), &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::SpectralCollision { .. }));
    }

    #[test]
    fn resolvent_translation_and_conjugation_preserve_pairs() {
        let p = cauchy3();
        let tol = Tolerances::default();
        let f = RationalFn {
            poly: vec![c(1.0, 0.0), c(0.0, 0.5)],
            poles: vec![(c(5.0, 1.0), c(0.3, -0.1))],
        };
        let t = apply_symmetry(&p, &SymmetryOp::TranslateX(f), &tol).unwrap();
        assert!(t.defect() <= 1e-10);
        let g = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.0)],
            vec![c(0.0, -0.3), c(1.0, 0.0), c(0.4, 0.0)],
            vec![c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.2)],
        ])
        .unwrap();
        let t = apply_symmetry(&p, &SymmetryOp::Conjugate(g), &tol).unwrap();
        assert!(t.defect() <= 1e-10);
        let (a, b) = (p.x().eigenvalues().unwrap(), t.x().eigenvalues().unwrap());
        let trace_diff: Complex64 = a.iter().sum::<Complex64>() - b.iter().sum::<Complex64>();
        assert!(trace_diff.norm() < 1e-12);
    }

    #[test]
    fn singular_conjugator_is_rejected() {
        let p = cauchy3();
        let g = ComplexMatrix::zeros(3);
        assert!(apply_symmetry(&p, &SymmetryOp::Conjugate(g), &Tolerances::default()).is_err());
    }
}
