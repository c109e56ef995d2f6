//! Tau functions in Miwa variables and their two-variable lattice sections.
//!
//! `tau(l, lambda) = det(X + sum_i l_i (lambda_i I - Z)^{-1})`. The section
//! `tau^m(x)` fixes two terms: weight `x / eta` at `lambda1` and weight `m`
//! at `lambda2`. For fixed `m` it is a polynomial of degree `n` in `x` whose
//! roots are the eigenvalues of the flow matrix (see [`crate::flow`]).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{flow_matrix, match_multisets};
use crate::matrix::{ensure_off_spectrum, ComplexMatrix};
use crate::pair::{basic_2x2_pair, CMPair};
use crate::tolerance::Tolerances;

/// Finitely many Miwa terms `(weight l_i, pole lambda_i)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MiwaPoint {
    pub terms: Vec<(Complex64, Complex64)>,
}

impl MiwaPoint {
    pub fn new(terms: Vec<(Complex64, Complex64)>) -> Self {
        Self { terms }
    }

    pub fn with_term(mut self, weight: Complex64, pole: Complex64) -> Self {
        self.terms.push((weight, pole));
        self
    }
}

/// Lattice spacing `eta` and the two poles selecting the `(x, m)` slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub eta: Complex64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl LatticeSection {
    pub fn new(eta: Complex64, lambda1: Complex64, lambda2: Complex64) -> Result<Self> {
        if eta.norm() == 0.0 || !eta.is_finite() {
            return Err(Error::ZeroEta);
        }
        Ok(Self { eta, lambda1, lambda2 })
    }

    /// `lambda1 == lambda2` up to `floor` (relative); the factorization
    /// prefactor vanishes and the flow becomes a pure shift.
    pub fn is_degenerate(&self, tol: &Tolerances) -> bool {
        let scale = self.lambda1.norm().max(self.lambda2.norm()).max(1.0);
        (self.lambda1 - self.lambda2).norm() <= tol.floor * scale
    }

    /// Checks `eta != 0` and that both poles avoid the spectrum of `Z`.
    pub fn validate_for(&self, pair: &CMPair, tol: &Tolerances) -> Result<()> {
        if self.eta.norm() == 0.0 {
            return Err(Error::ZeroEta);
        }
        let spectrum = pair.z().eigenvalues()?;
        ensure_off_spectrum(&spectrum, self.lambda1, tol.spectral, "lambda1")?;
        ensure_off_spectrum(&spectrum, self.lambda2, tol.spectral, "lambda2")
    }
}

/// Coefficients of `tau^m(x)` in ascending powers of `x`, plus the
/// interpolation circle they were sampled on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauPolynomial {
    pub m: Complex64,
    pub coefficients: Vec<Complex64>,
    pub radius: f64,
    /// `max |tau^m|` over the interpolation nodes.
    pub circle_max: f64,
}

impl TauPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coefficients.last().expect("nonempty")
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// Roots via the companion matrix of the polynomial rescaled to the
    /// interpolation circle. Kept as an independent route to the roots.
    pub fn companion_roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        let r = self.radius;
        // q(y) = p(r y) / (c_n r^n), monic in y.
        let scaled: Vec<Complex64> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * r.powi(k as i32))
            .collect();
        let lead = scaled[n];
        if lead.norm() == 0.0 {
            return Err(Error::Input("tau polynomial has vanishing leading coefficient".into()));
        }
        let mut comp = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -scaled[i] / lead;
        }
        let ys = ComplexMatrix::from_inner(comp)?.eigenvalues()?;
        Ok(ys.into_iter().map(|y| y * r).collect())
    }
}

/// Evaluates `tau^m(x)` for one pair and section with the two resolvents cached.
pub struct SectionEvaluator<'a> {
    pair: &'a CMPair,
    section: LatticeSection,
    r1: ComplexMatrix,
    r2: ComplexMatrix,
}

impl<'a> SectionEvaluator<'a> {
    pub fn new(pair: &'a CMPair, section: LatticeSection, tol: &Tolerances) -> Result<Self> {
        section.validate_for(pair, tol)?;
        Ok(Self {
            pair,
            section,
            r1: pair.z().resolvent(section.lambda1)?,
            r2: pair.z().resolvent(section.lambda2)?,
        })
    }

    pub fn section(&self) -> &LatticeSection {
        &self.section
    }

    /// `X + (x / eta) R1 + m R2`.
    pub fn matrix(&self, m: Complex64, x: Complex64) -> Result<ComplexMatrix> {
        let w = x / self.section.eta;
        ComplexMatrix::from_inner(self.pair.x().inner() + self.r1.inner() * w + self.r2.inner() * m)
    }

    pub fn tau(&self, m: Complex64, x: Complex64) -> Result<Complex64> {
        Ok(self.matrix(m, x)?.determinant())
    }

    /// `tau^m(x)` with the Hadamard bound of its matrix, the scale below which
    /// the value is numerically zero.
    pub fn tau_with_scale(&self, m: Complex64, x: Complex64) -> Result<(Complex64, f64)> {
        let mat = self.matrix(m, x)?;
        Ok((mat.determinant(), mat.hadamard_bound()))
    }

    /// `eta^{-n} / det(lambda1 I - Z)`.
    pub fn expected_leading(&self) -> Complex64 {
        let n = self.pair.n() as i32;
        let det_a = self.pair.z().shifted_negation(self.section.lambda1).determinant();
        self.section.eta.powi(-n) / det_a
    }
}

pub fn tau_miwa(pair: &CMPair, point: &MiwaPoint, tol: &Tolerances) -> Result<Complex64> {
    tau_miwa_matrices(pair.x(), pair.z(), point, tol)
}

/// The same determinant for an arbitrary square `(X, Z)`; the commutator
/// condition plays no role in the definition. Used for images that leave the
/// phase space, such as the plain transpose for `n >= 3`.
pub fn tau_miwa_matrices(x: &ComplexMatrix, z: &ComplexMatrix, point: &MiwaPoint, tol: &Tolerances) -> Result<Complex64> {
    if x.n() != z.n() {
        return Err(Error::Dimension {
            expected: x.n(),
            found: z.n(),
        });
    }
    let mut acc = x.inner().clone();
    let active: Vec<_> = point.terms.iter().filter(|(l, _)| l.norm() != 0.0).collect();
    if !active.is_empty() {
        let spectrum = z.eigenvalues()?;
        for (i, &&(weight, pole)) in active.iter().enumerate() {
            ensure_off_spectrum(&spectrum, pole, tol.spectral, &format!("miwa term {i}"))?;
            acc += z.resolvent(pole)?.inner() * weight;
        }
    }
    Ok(ComplexMatrix::from_inner(acc)?.determinant())
}

/// `tau^m(x)`: the Miwa point `[(x / eta, lambda1), (m, lambda2)]`.
pub fn tau_section(
    pair: &CMPair,
    section: &LatticeSection,
    m: Complex64,
    x: Complex64,
    tol: &Tolerances,
) -> Result<Complex64> {
    section.validate_for(pair, tol)?;
    let point = MiwaPoint::new(vec![(x / section.eta, section.lambda1), (m, section.lambda2)]);
    tau_miwa(pair, &point, tol)
}

/// Interpolates `tau^m` at the `n + 1` roots of unity scaled to radius
/// `max(1, |eta| * scale)`, where `scale = ||X(m)||_F / |eta|` bounds the roots.
pub fn tau_polynomial(
    pair: &CMPair,
    section: &LatticeSection,
    m: Complex64,
    tol: &Tolerances,
) -> Result<TauPolynomial> {
    let ev = SectionEvaluator::new(pair, *section, tol)?;
    let radius = flow_matrix(pair, section, m, tol)?.frobenius_norm().max(1.0);
    interpolate(&ev, m, radius, tol)
}

fn interpolate(ev: &SectionEvaluator<'_>, m: Complex64, radius: f64, tol: &Tolerances) -> Result<TauPolynomial> {
    let n = ev.pair.n();
    let nodes = n + 1;
    let omega = |k: f64| Complex64::from_polar(1.0, 2.0 * PI * k / nodes as f64);

    let values = (0..nodes)
        .map(|k| ev.tau(m, omega(k as f64) * radius))
        .collect::<Result<Vec<_>>>()?;
    let circle_max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);

    let coefficients: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * omega(-((j * k) as f64)))
                .sum();
            sum / (nodes as f64 * radius.powi(j as i32))
        })
        .collect();

    let poly = TauPolynomial {
        m,
        coefficients,
        radius,
        circle_max,
    };

    // Off-grid check at the midpoints between nodes.
    let mut residual = 0.0_f64;
    for k in 0..nodes {
        let x = omega(k as f64 + 0.5) * radius;
        residual = residual.max((poly.eval(x) - ev.tau(m, x)?).norm());
    }
    let scale = circle_max.max(f64::MIN_POSITIVE);
    if residual > tol.root * scale {
        return Err(Error::Conditioning {
            residual: residual / scale,
            tol: tol.root,
        });
    }
    let expected = ev.expected_leading();
    let lead_err = (poly.leading() - expected).norm() / expected.norm();
    if lead_err > tol.root {
        return Err(Error::Conditioning {
            residual: lead_err,
            tol: tol.root,
        });
    }
    Ok(poly)
}

/// Roots of `tau^m` as the eigenvalues of the flow matrix, in no particular order.
pub fn tau_roots(pair: &CMPair, section: &LatticeSection, m: Complex64, tol: &Tolerances) -> Result<Vec<Complex64>> {
    section.validate_for(pair, tol)?;
    flow_matrix(pair, section, m, tol)?.eigenvalues()
}

/// The displayed closed-form eigenvalue expression for the 2x2 example,
/// `(-eta b +- sigma) / (2 lambda2)` with `b = lambda1 m + lambda2 (lambda1 + m - 1)`
/// and `sigma = sqrt(eta^2 (b^2 - 4 lambda1 lambda2 m (lambda2 + m - 1)))`.
pub fn closed_form_2x2(eta: Complex64, lambda1: Complex64, lambda2: Complex64, m: Complex64) -> Result<[Complex64; 2]> {
    if lambda2.norm() == 0.0 {
        return Err(Error::Input("closed form divides by lambda2 = 0".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let b = lambda1 * m + lambda2 * (lambda1 + m - one);
    let sigma = (eta * eta * (b * b - 4.0 * lambda1 * lambda2 * m * (lambda2 + m - one))).sqrt();
    let denom = 2.0 * lambda2;
    Ok([(-eta * b + sigma) / denom, (-eta * b - sigma) / denom])
}

/// Side-by-side comparison of the closed-form expression and the roots of
/// `tau^m` on the 2x2 nilpotent pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormDiscrepancy {
    pub section: LatticeSection,
    pub m: Complex64,
    pub closed_form: [Complex64; 2],
    pub derived: [Complex64; 2],
    /// `tau^m` evaluated at each closed-form root, relative to `max |tau^m|` on the circle.
    pub tau_at_closed_form: [f64; 2],
    pub tau_at_derived: [f64; 2],
    pub closed_form_separation: f64,
    pub derived_separation: f64,
    /// Largest distance after optimal matching, relative to `max(1, |roots|)`.
    pub matched_distance: f64,
    pub consistent: bool,
}

pub fn compare_closed_form_2x2(section: &LatticeSection, m: Complex64, tol: &Tolerances) -> Result<ClosedFormDiscrepancy> {
    let pair = basic_2x2_pair();
    let closed_form = closed_form_2x2(section.eta, section.lambda1, section.lambda2, m)?;
    let roots = tau_roots(&pair, section, m, tol)?;
    let derived = [roots[0], roots[1]];
    let poly = tau_polynomial(&pair, section, m, tol)?;
    let ev = SectionEvaluator::new(&pair, *section, tol)?;
    let rel_tau = |x: Complex64| -> Result<f64> { Ok(ev.tau(m, x)?.norm() / poly.circle_max) };

    let perm = match_multisets(&closed_form, &derived)?;
    let scale = closed_form
        .iter()
        .chain(derived.iter())
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let matched_distance = (0..2)
        .map(|i| (closed_form[i] - derived[perm[i]]).norm())
        .fold(0.0, f64::max)
        / scale;
    Ok(ClosedFormDiscrepancy {
        section: *section,
        m,
        closed_form,
        derived,
        tau_at_closed_form: [rel_tau(closed_form[0])?, rel_tau(closed_form[1])?],
        tau_at_derived: [rel_tau(derived[0])?, rel_tau(derived[1])?],
        closed_form_separation: (closed_form[0] - closed_form[1]).norm(),
        derived_separation: (derived[0] - derived[1]).norm(),
        matched_distance,
        consistent: matched_distance <= tol.root,
    })
}
