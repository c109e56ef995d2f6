//! Seeded random pairs and sections for sweeps.
//!
//! Pairs are Cauchy pairs (members of the phase space by construction) with
//! positions uniform in the unit disk, rejection-sampled to a minimum
//! separation, and standard complex normal momenta.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::matrix::{ensure_off_spectrum, ComplexMatrix};
use crate::pair::{cm_pair_from_positions, CMPair};
use crate::symmetry::{apply_symmetry, RationalFn, SymmetryOp};
use crate::tau::LatticeSection;
use crate::tolerance::Tolerances;

pub const MIN_SEPARATION: f64 = 1e-2;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unit_disk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() < 1.0 {
            return z;
        }
    }
}

pub fn random_positions<R: Rng + ?Sized>(rng: &mut R, n: usize, min_separation: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = unit_disk(rng);
        if out.iter().all(|w| (w - z).norm() >= min_separation) {
            out.push(z);
        }
    }
    out
}

pub fn random_cauchy_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: &Tolerances) -> Result<CMPair> {
    let x = random_positions(rng, n, MIN_SEPARATION);
    let p: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
    cm_pair_from_positions(&x, &p, tol.separation, tol.rank_one)
}

/// A Cauchy pair translated by `X -> X - x_0 I`, so `det X = 0`.
pub fn random_singular_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: &Tolerances) -> Result<CMPair> {
    let pair = random_cauchy_pair(rng, n, tol)?;
    let shift = -pair.x().get(0, 0);
    apply_symmetry(&pair, &SymmetryOp::TranslateX(RationalFn::constant(shift)), tol)
}

/// `g = I + (0.5 / sqrt n) G` with complex normal `G`, redrawn until its
/// condition number is below 100.
pub fn random_conjugator<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let scale = 0.5 / (n as f64).sqrt();
    loop {
        let g = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            Complex64::new(delta, 0.0) + complex_normal(rng) * scale
        });
        let g = ComplexMatrix::from_inner(g).expect("finite");
        let sv = g.singular_values();
        if sv[n - 1] > 0.0 && sv[0] / sv[n - 1] < 100.0 {
            return g;
        }
    }
}

/// A point at distance at least `margin` from every eigenvalue of `m`,
/// drawn from the annulus `1.5 r <= |z| <= 3 r`, `r = max(1, spectral radius)`.
pub fn random_point_off_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[Complex64], margin: f64) -> Complex64 {
    let radius = spectrum.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    loop {
        let r = radius * rng.random_range(1.5..3.0);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let z = Complex64::from_polar(r, theta);
        if ensure_off_spectrum(spectrum, z, margin, "sample").is_ok() {
            return z;
        }
    }
}

/// Generic section: `|eta|` in `[0.5, 1.5]` with random phase, and two
/// poles well off the spectrum of `Z` and at least `0.1 r` apart.
pub fn random_section<R: Rng + ?Sized>(rng: &mut R, pair: &CMPair) -> Result<LatticeSection> {
    let spectrum = pair.z().eigenvalues()?;
    let radius = spectrum.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let eta = Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..std::f64::consts::TAU));
    let lambda1 = random_point_off_spectrum(rng, &spectrum, 0.1);
    let lambda2 = loop {
        let l = random_point_off_spectrum(rng, &spectrum, 0.1);
        if (l - lambda1).norm() >= 0.1 * radius {
            break l;
        }
    };
    LatticeSection::new(eta, lambda1, lambda2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_pair() {
        let t = Tolerances::default();
        let a = random_cauchy_pair(&mut rng_from_seed(7), 5, &t).unwrap();
        let b = random_cauchy_pair(&mut rng_from_seed(7), 5, &t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn positions_respect_separation() {
        let mut rng = rng_from_seed(3);
        let x = random_positions(&mut rng, 40, 0.05);
        for i in 0..x.len() {
            assert!(x[i].norm() < 1.0);
            for j in 0..i {
                assert!((x[i] - x[j]).norm() >= 0.05);
            }
        }
    }

    #[test]
    fn singular_pair_has_zero_position() {
        let t = Tolerances::default();
        let p = random_singular_pair(&mut rng_from_seed(11), 4, &t).unwrap();
        assert_eq!(p.x().get(0, 0), Complex64::new(0.0, 0.0));
        assert_eq!(p.x().determinant(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn section_is_valid() {
        let t = Tolerances::default();
        let mut rng = rng_from_seed(5);
        for n in 1..6 {
            let p = random_cauchy_pair(&mut rng, n, &t).unwrap();
            let s = random_section(&mut rng, &p).unwrap();
            s.validate_for(&p, &t).unwrap();
            assert!(!s.is_degenerate(&t));
        }
    }
}
