mod common;

use cm_bethe::sampling::{random_cauchy_pair, random_section, rng_from_seed};
use cm_bethe::*;
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn generic(seed: u64, n: usize) -> (CMPair, LatticeSection) {
    let t = Tolerances::default();
    let mut rng = rng_from_seed(seed);
    let pair = random_cauchy_pair(&mut rng, n, &t).unwrap();
    let s = random_section(&mut rng, &pair).unwrap();
    (pair, s)
}

#[test]
fn flow_is_affine_in_m() {
    let t = Tolerances::default();
    for seed in 0..10 {
        let (pair, s) = generic(seed, 2 + seed as usize % 5);
        let step = step_matrix(&pair, &s, &t).unwrap();
        let base = flow_matrix(&pair, &s, c(0.0, 0.0), &t).unwrap();
        for m in -10..=10 {
            let mc = c(m as f64, 0.0);
            let got = flow_matrix(&pair, &s, mc, &t).unwrap();
            let next = flow_matrix(&pair, &s, mc + 1.0, &t).unwrap();
            let want = base.inner() + step.inner() * mc;
            let denom = got.frobenius_norm().max(1.0);
            assert!((got.inner() - want).norm() <= 1e-13 * denom);
            assert!((next.inner() - got.inner() - step.inner()).norm() <= 1e-13 * denom);
        }
    }
}

#[test]
fn step_matches_its_definition() {
    let t = Tolerances::default();
    let s = LatticeSection::new(c(0.5, -0.5), c(1.5, 0.5), c(-2.0, 1.0)).unwrap();
    let pair = basic_2x2_pair();
    let z = rows(pair.z());
    let a = add(&scale(&identity(2), s.lambda1), &scale(&z, c(-1.0, 0.0)));
    let want = scale(&matmul(&resolvent(&z, s.lambda2), &a), -s.eta);
    let got = rows(&step_matrix(&pair, &s, &t).unwrap());
    assert!(frob_diff(&got, &want) <= 1e-14);
}

#[test]
fn matching_recovers_random_permutations() {
    let mut rng = rng_from_seed(50);
    for n in 1..=6 {
        for _ in 0..10 {
            let a = random_vec(&mut rng, n);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let b: Vec<Complex64> = perm.iter().map(|&k| a[k]).collect();
            let got = match_multisets(&a, &b).unwrap();
            for i in 0..n {
                assert_eq!(b[got[i]], a[i]);
            }
            let noisy: Vec<Complex64> = b.iter().map(|z| z + random_vec(&mut rng, 1)[0] * 1e-3).collect();
            let got = match_multisets(&a, &noisy).unwrap();
            let cost: f64 = (0..n).map(|i| (a[i] - noisy[got[i]]).norm()).sum();
            let (_, best) = brute_force_assignment(&a, &noisy);
            assert!(cost <= best + 1e-12);
        }
    }
}

#[test]
fn matching_breaks_ties_by_lexicographic_order() {
    // Both assignments cost 2; the smaller b entry goes to the first row.
    let a = [c(0.0, 0.0), c(0.0, 0.0)];
    let b = [c(1.0, 0.0), c(-1.0, 0.0)];
    assert_eq!(match_multisets(&a, &b).unwrap(), vec![1, 0]);
}

#[test]
fn equal_poles_give_arithmetic_progressions() {
    let t = Tolerances::default();
    let eta = c(1.0, 0.0);
    let s = LatticeSection::new(eta, c(3.0, 0.0), c(3.0, 0.0)).unwrap();
    let traj = run_trajectory(&basic_2x2_pair(), &s, 0, 5, &t).unwrap();
    assert_eq!(traj.m_values, (0..=5).collect::<Vec<_>>());
    for j in 0..2 {
        let col = traj.column(j);
        for w in col.windows(2) {
            assert!((w[1] - w[0] + eta).norm() <= 1e-12);
        }
    }
    for level in &traj.roots {
        assert!(((level[0] - level[1]).norm() - 1.0).abs() <= 1e-12);
    }
    assert!(traj.flagged.iter().all(|f| !f));

    // Larger pairs: X(m) = X(0) - m eta I, so every column moves by -eta.
    let (pair, generic_s) = generic(51, 5);
    let s = LatticeSection::new(generic_s.eta, generic_s.lambda1, generic_s.lambda1).unwrap();
    let traj = run_trajectory(&pair, &s, -3, 3, &t).unwrap();
    for j in 0..5 {
        for w in traj.column(j).windows(2) {
            assert!((w[1] - w[0] + s.eta).norm() <= 1e-10);
        }
    }
}

#[test]
fn one_particle_trajectory_is_linear() {
    let t = Tolerances::default();
    let pair = validate_pair(
        &ComplexMatrix::from_rows(&[vec![c(0.2, 0.0)]]).unwrap(),
        &ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)]]).unwrap(),
        1e-10,
    )
    .unwrap();
    let s = LatticeSection::new(c(1.0, 0.5), c(2.0, 0.0), c(-2.0, 0.0)).unwrap();
    let traj = run_trajectory(&pair, &s, -4, 4, &t).unwrap();
    let col = traj.column(0);
    let d = col[1] - col[0];
    for w in col.windows(2) {
        assert!((w[1] - w[0] - d).norm() <= 1e-13);
    }
}

#[test]
fn trajectory_transports_under_transpose() {
    let t = Tolerances::default();
    // n = 2: the transposed pair is still in the phase space.
    let (pair, s) = generic(52, 2);
    let tp = apply_symmetry(&pair, &SymmetryOp::Transpose, &t).unwrap();
    let a = run_trajectory(&pair, &s, -3, 3, &t).unwrap();
    let b = run_trajectory(&tp, &s, -3, 3, &t).unwrap();
    for (x, y) in a.roots.iter().zip(&b.roots) {
        assert!(multiset_distance(x, y) <= 1e-10);
    }
    // n >= 3: roots are still zeros of the transposed determinant.
    for n in 3..=5 {
        let (pair, s) = generic(53 + n as u64, n);
        let (xt, zt) = (pair.x().transpose(), pair.z().transpose());
        let traj = run_trajectory(&pair, &s, -2, 2, &t).unwrap();
        for (i, &m) in traj.m_values.iter().enumerate() {
            let m = c(m as f64, 0.0);
            let circle = tau_polynomial(&pair, &s, m, &t).unwrap().circle_max;
            for &x in &traj.roots[i] {
                let point = MiwaPoint::new(vec![(x / s.eta, s.lambda1), (m, s.lambda2)]);
                let v = tau_miwa_matrices(&xt, &zt, &point, &t).unwrap();
                assert!(v.norm() <= 1e-7 * circle);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectories_solve_the_bethe_equations(seed in any::<u64>(), n in 1usize..=6) {
        let t = Tolerances::default();
        let (pair, s) = generic(seed, n);
        let traj = run_trajectory(&pair, &s, -5, 5, &t).unwrap();
        for (i, level) in traj.roots.iter().enumerate() {
            prop_assert_eq!(level.len(), n);
            // Matching permutes, never alters, the eigenvalues.
            let direct = tau_roots(&pair, &s, c(traj.m_values[i] as f64, 0.0), &t).unwrap();
            prop_assert!(multiset_distance(level, &direct) == 0.0);
        }
        for i in 1..traj.roots.len() - 1 {
            for j in 0..n {
                let r = check_rnba(&traj.roots[i - 1], &traj.roots[i], &traj.roots[i + 1], s.eta, j, &t).unwrap();
                prop_assert!(r.passed(), "{:?}", r);
                prop_assert!(r.rel_residual <= 1e-6);
            }
        }
    }
}
