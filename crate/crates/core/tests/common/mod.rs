//! Independent oracles for the integration tests. Nothing here calls into the
//! library's linear algebra.

#![allow(dead_code)]

use cm_bethe::sampling::complex_normal;
use cm_bethe::{ComplexMatrix, Complex64};
use itertools::Itertools;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.n()).map(|i| (0..m.n()).map(|j| m.get(i, j)).collect()).collect()
}

pub fn from_rows(a: &[Vec<Complex64>]) -> ComplexMatrix {
    ComplexMatrix::from_rows(a).unwrap()
}

/// Gaussian elimination with partial pivoting on a plain row array.
pub fn det(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut acc = c(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap();
        if m[piv][col].norm() == 0.0 {
            return c(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            acc = -acc;
        }
        acc *= m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[r][k] -= f * v;
            }
        }
    }
    acc
}

fn minor(a: &[Vec<Complex64>], skip_r: usize, skip_c: usize) -> Vec<Vec<Complex64>> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != skip_c).map(|(_, v)| *v).collect())
        .collect()
}

/// Transposed cofactor matrix.
pub fn cofactor_adjugate(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    if n == 1 {
        return vec![vec![c(1.0, 0.0)]];
    }
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            out[j][i] = det(&minor(a, i, j)) * sign;
        }
    }
    out
}

pub fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn add(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn scale(a: &[Vec<Complex64>], s: Complex64) -> Vec<Vec<Complex64>> {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn identity(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

/// `(point I - m)^{-1}` as `adj / det`.
pub fn resolvent(m: &[Vec<Complex64>], point: Complex64) -> Vec<Vec<Complex64>> {
    let shifted = add(&scale(&identity(m.len()), point), &scale(m, c(-1.0, 0.0)));
    let d = det(&shifted);
    scale(&cofactor_adjugate(&shifted), c(1.0, 0.0) / d)
}

pub fn frob(a: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn random_rows<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<Complex64>> {
    (0..n).map(|_| (0..n).map(|_| complex_normal(rng)).collect()).collect()
}

pub fn random_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn rel_close(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Minimum over all permutations of `max_i |a_i - b_{pi(i)}|`.
pub fn brute_force_bottleneck(a: &[Complex64], b: &[Complex64]) -> f64 {
    (0..b.len())
        .permutations(b.len())
        .map(|p| (0..a.len()).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Permutation minimizing `sum_i |a_i - b_{pi(i)}|`, with its cost.
pub fn brute_force_assignment(a: &[Complex64], b: &[Complex64]) -> (Vec<usize>, f64) {
    (0..b.len())
        .permutations(b.len())
        .map(|p| {
            let cost: f64 = (0..a.len()).map(|i| (a[i] - b[p[i]]).norm()).sum();
            (p, cost)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap()
}

/// Matched distance between two multisets of equal size, exhaustive for small `n`.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    brute_force_bottleneck(a, b)
}
