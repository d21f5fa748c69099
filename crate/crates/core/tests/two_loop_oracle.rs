//! Two-loop recursion against an explicit dense inverse-BFGS matrix.

use lmoq_core::LmemBuffer;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense `H` built pair by pair from `H₀ = h0·I`:
/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn dense_inverse_bfgs(buf: &LmemBuffer) -> DMatrix<f64> {
    let d = buf.dim();
    let eye = DMatrix::<f64>::identity(d, d);
    let mut h = eye.scale(buf.h0_scale());
    for p in buf.pairs() {
        let s = DVector::from_column_slice(&p.s);
        let y = DVector::from_column_slice(&p.y);
        let rho = 1.0 / y.dot(&s);
        let left = &eye - (&s * y.transpose()).scale(rho);
        let right = &eye - (&y * s.transpose()).scale(rho);
        h = &left * h * &right + (&s * s.transpose()).scale(rho);
    }
    h
}

fn random_spd(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    m.transpose() * &m + DMatrix::identity(d, d).scale(0.5)
}

/// Buffer filled with `n_pairs` secant pairs `y = A s` of a random SPD `A`.
fn random_buffer(d: usize, m: usize, n_pairs: usize, rng: &mut ChaCha8Rng) -> LmemBuffer {
    let a = random_spd(d, rng);
    let mut buf = LmemBuffer::new(d, m).unwrap();
    for _ in 0..n_pairs {
        let s = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let y = &a * &s;
        assert!(buf.push_pair(s.as_slice().to_vec(), y.as_slice().to_vec()).unwrap());
    }
    buf
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / scale.max(f64::MIN_POSITIVE)
}

#[test]
fn matches_dense_oracle_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.random_range(1..=10);
        let n_pairs = rng.random_range(0..=8);
        let buf = random_buffer(d, 8, n_pairs, &mut rng);
        let h = dense_inverse_bfgs(&buf);
        let r: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let expected = &h * DVector::from_column_slice(&r);
        let got = buf.two_loop(&r).unwrap();
        worst = worst.max(rel_err(&got, expected.as_slice()));
    }
    assert!(worst <= 1e-10, "worst relative error {worst:e}");
}

#[test]
fn eight_dimensional_five_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let buf = random_buffer(8, 16, 5, &mut rng);
    let h = dense_inverse_bfgs(&buf);
    let r: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let expected = &h * DVector::from_column_slice(&r);
    assert!(rel_err(&buf.two_loop(&r).unwrap(), expected.as_slice()) <= 1e-10);
}

#[test]
fn oracle_satisfies_secant_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n_pairs in 1..=6 {
        let buf = random_buffer(6, 6, n_pairs, &mut rng);
        let h = dense_inverse_bfgs(&buf);
        let last = buf.pairs().last().unwrap();
        let hy = &h * DVector::from_column_slice(&last.y);
        assert!(rel_err(hy.as_slice(), &last.s) <= 1e-10);
        // and the recursion agrees with the oracle on that vector
        assert!(rel_err(&buf.two_loop(&last.y).unwrap(), &last.s) <= 1e-10);
    }
}

#[test]
fn evicted_pairs_no_longer_contribute() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let full = random_buffer(5, 3, 7, &mut rng);
    assert_eq!(full.len(), 3);
    let h = dense_inverse_bfgs(&full);
    let r = [0.3, -0.1, 0.9, 0.2, -0.5];
    let expected = &h * DVector::from_column_slice(&r);
    assert!(rel_err(&full.two_loop(&r).unwrap(), expected.as_slice()) <= 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_loop_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(2..=10);
        let buf = random_buffer(d, 6, rng.random_range(0..=6), &mut rng);
        let r1: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let combo: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| a * x + b * y).collect();
        let lhs = buf.two_loop(&combo).unwrap();
        let (h1, h2) = (buf.two_loop(&r1).unwrap(), buf.two_loop(&r2).unwrap());
        let rhs: Vec<f64> = h1.iter().zip(&h2).map(|(x, y)| a * x + b * y).collect();
        let scale = h1.iter().chain(&h2).map(|x| x.abs()).fold(0.0, f64::max) * (a.abs() + b.abs());
        let diff = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn implicit_inverse_hessian_is_positive_definite(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..=10);
        let buf = random_buffer(d, 8, rng.random_range(0..=8), &mut rng);
        let r: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        prop_assume!(r.iter().any(|x| *x != 0.0));
        let hr = buf.two_loop(&r).unwrap();
        prop_assert!(r.iter().zip(&hr).map(|(a, b)| a * b).sum::<f64>() > 0.0);
    }

    #[test]
    fn two_loop_never_mutates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let buf = random_buffer(4, 3, 4, &mut rng);
        let before: Vec<_> = buf.pairs().cloned().collect();
        let scale = buf.h0_scale();
        let _ = buf.two_loop(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        prop_assert_eq!(before, buf.pairs().cloned().collect::<Vec<_>>());
        prop_assert_eq!(scale, buf.h0_scale());
    }
}
