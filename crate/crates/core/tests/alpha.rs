mod common;

use common::*;
use num_complex::Complex64;
use trigmv::alpha::{normest_power, AlphaCache, EstimatorConfig};
use trigmv::operator::{MatrixOperator, ShiftedOperator};

fn cfg() -> EstimatorConfig {
    EstimatorConfig::default()
}

#[test]
fn diagonal_square_is_exact() {
    let a = MatrixOperator::diagonal(&[1.0, 2.0, 3.0]);
    let e = normest_power::<f64, _>(&a, 2, &cfg()).unwrap();
    assert_eq!(e.value, 9.0);
    assert!(e.converged);
    assert!(e.mv > 0);
}

#[test]
fn nilpotent_square_is_zero() {
    let a = MatrixOperator::dense_from_rows(&[vec![0.0, 4.0], vec![0.0, 0.0]]).unwrap();
    assert_eq!(normest_power::<f64, _>(&a, 2, &cfg()).unwrap().value, 0.0);
    let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 8).unwrap();
    assert_eq!(cache.d(1).unwrap(), 4.0);
    assert_eq!(cache.alpha(2).unwrap(), 0.0);
}

#[test]
fn scaled_identity_has_constant_alpha() {
    let a = MatrixOperator::diagonal(&[2.0; 5]);
    let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 8).unwrap();
    for p in 2..=8 {
        assert!((cache.alpha(p).unwrap() - 2.0).abs() < 1e-14);
    }
}

#[test]
fn random_power_within_factor_three() {
    let mut r = rng(31);
    for _ in 0..20 {
        let a = random_real(&mut r, 10, 1.0);
        let exact = power_norm(&a, 3);
        let est = normest_power::<f64, _>(&a, 3, &cfg()).unwrap().value;
        assert!(est <= exact * (1.0 + 1e-12) && est >= exact / 3.0, "{est} vs {exact}");
    }
}

#[test]
fn complex_power_uses_adjoint() {
    let mut r = rng(32);
    for _ in 0..10 {
        let a = random_complex(&mut r, 8, 1.0);
        let exact = power_norm(&a, 3);
        let est = normest_power::<Complex64, _>(&a, 3, &cfg()).unwrap().value;
        assert!(est <= exact * (1.0 + 1e-12) && est >= exact / 3.0, "{est} vs {exact}");
    }
}

#[test]
fn first_power_exact_for_narrow_matrices() {
    let mut r = rng(33);
    let a = random_real(&mut r, 2, 1.0);
    let est = normest_power::<f64, _>(&a, 1, &cfg()).unwrap().value;
    assert!((est - a.one_norm().unwrap()).abs() < 1e-15);
}

#[test]
fn alpha_bounded_by_one_norm() {
    let mut r = rng(34);
    for _ in 0..20 {
        let a = random_real(&mut r, 12, 1.0);
        let norm = a.one_norm().unwrap();
        let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 8).unwrap();
        for p in 2..=8 {
            let al = cache.alpha(p).unwrap();
            assert!(al >= 0.0 && al <= norm + 1e-12);
        }
    }
}

#[test]
fn symmetric_d8_near_spectral_radius() {
    let mut r = rng(35);
    for _ in 0..10 {
        let a = random_symmetric(&mut r, 10, 1.0);
        let eig = nalgebra::DMatrix::from_column_slice(10, 10, &a.to_dense()).symmetric_eigenvalues();
        let rho = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 8).unwrap();
        let d8 = cache.d(8).unwrap();
        assert!((d8 - rho).abs() <= 0.2 * rho, "d8 = {d8}, rho = {rho}");
    }
}

#[test]
fn repeated_queries_are_free() {
    let mut r = rng(36);
    let a = random_real(&mut r, 15, 1.0);
    let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 8).unwrap();
    let first: Vec<f64> = (2..=8).map(|p| cache.alpha(p).unwrap()).collect();
    let spent = cache.mv_used();
    assert!(spent > 0);
    let again: Vec<f64> = (2..=8).map(|p| cache.alpha(p).unwrap()).collect();
    assert_eq!(first, again);
    assert_eq!(cache.mv_used(), spent);
    assert_eq!(cache.summary().alpha(4), Some(first[2]));
}

#[test]
fn fixed_seed_is_reproducible() {
    let mut r = rng(37);
    let a = random_real(&mut r, 30, 1.0);
    let run = |seed| {
        let c = EstimatorConfig { seed, ..cfg() };
        let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), c, 8).unwrap();
        let v: Vec<f64> = (2..=8).map(|p| cache.alpha(p).unwrap()).collect();
        (v, cache.mv_used())
    };
    assert_eq!(run(7), run(7));
}

#[test]
fn shift_is_applied_implicitly() {
    let a = MatrixOperator::diagonal(&[3.0, 5.0]);
    let mut cache = AlphaCache::new(ShiftedOperator::new(&a, 4.0), cfg(), 8).unwrap();
    for p in 2..=8 {
        assert!((cache.alpha(p).unwrap() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn rejects_bad_p() {
    let a = MatrixOperator::<f64>::identity(3);
    assert!(AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 1).is_err());
    let mut cache = AlphaCache::new(ShiftedOperator::unshifted(&a), cfg(), 4).unwrap();
    assert!(cache.alpha(1).is_err());
    assert!(cache.alpha(5).is_err());
}
