mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use trigmv::operator::{MatrixOperator, ShiftedOperator};
use trigmv::params::{alpha_branch, norm_branch, select_parameters, shift, SelectionOptions, SelectionPath};
use trigmv::theta::M_MAX;
use trigmv::{ThetaTable, Tolerance};

fn table(tol: Tolerance) -> ThetaTable {
    ThetaTable::for_tolerance(tol).unwrap()
}

/// Exhaustive scan of `m⌈c/θ_m⌉`, first minimum wins.
fn scan_norm(c: f64, t: &ThetaTable) -> (usize, usize) {
    let costs: Vec<(usize, usize)> = (1..=M_MAX)
        .map(|m| (m, (c / t.theta(m)).ceil().max(1.0) as usize))
        .collect();
    let best = costs.iter().map(|(m, s)| m * s).min().unwrap();
    *costs.iter().find(|(m, s)| m * s == best).unwrap()
}

/// Exhaustive scan over every admissible `(m, p)`.
fn scan_alpha(alpha: &[f64], t: &ThetaTable, p_max: usize) -> (usize, usize) {
    let mut pairs = Vec::new();
    for p in 2..=p_max {
        for m in (p * (p - 1) - 1).max(1)..=M_MAX {
            let cost = m as f64 * (alpha[p] / t.theta(m)).ceil();
            if cost > 0.0 {
                pairs.push((cost as usize, m));
            }
        }
    }
    let best = pairs.iter().map(|x| x.0).min().unwrap();
    let m = pairs.iter().filter(|x| x.0 == best).map(|x| x.1).min().unwrap();
    (best, m)
}

#[test]
fn zero_scaled_norm_is_degenerate() {
    let z = MatrixOperator::<f64>::zeros(4);
    let (op, _) = shift(&z).unwrap();
    let c = select_parameters(op, 3.0, 1, &table(Tolerance::Double), &SelectionOptions::default()).unwrap();
    assert_eq!((c.m_star, c.s, c.path, c.cost_mv), (0, 1, SelectionPath::Zero, 0));
    let a = MatrixOperator::diagonal(&[1.0, -2.0]);
    let c = select_parameters(ShiftedOperator::unshifted(&a), 0.0, 1, &table(Tolerance::Double), &SelectionOptions::default())
        .unwrap();
    assert_eq!((c.m_star, c.s), (0, 1));
}

#[test]
fn shift_examples() {
    let a = MatrixOperator::diagonal(&[2.5; 4]);
    let (op, mu) = shift(&a).unwrap();
    assert_eq!(mu, 2.5);
    assert_eq!(op.one_norm().unwrap(), 0.0);

    let z = MatrixOperator::dense_from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
    let (op, mu) = shift(&z).unwrap();
    assert_eq!(mu, 0.0);
    assert_eq!(op.one_norm().unwrap(), z.one_norm().unwrap());

    let d = MatrixOperator::diagonal(&[1.0, 3.0]);
    let (_, mu) = shift(&d).unwrap();
    assert_eq!(mu, 2.0);
    let frob = |m: f64| ((1.0 - m).powi(2) + (3.0 - m).powi(2)).sqrt();
    assert!((frob(mu) - 2f64.sqrt()).abs() < 1e-15);
    for dm in [-0.1, -1e-3, 1e-3, 0.1] {
        assert!(frob(mu + dm) > frob(mu));
    }

    let c = MatrixOperator::diagonal(&[Complex64::new(1.0, 2.0), Complex64::new(3.0, -4.0)]);
    assert_eq!(shift(&c).unwrap().1, Complex64::new(2.0, -1.0));
}

#[test]
fn norm_branch_matches_scan() {
    let mut r = rng(41);
    for tol in [Tolerance::Half, Tolerance::Single, Tolerance::Double] {
        let t = table(tol);
        let mut cs: Vec<f64> = (0..300).map(|_| 10f64.powf(r.gen_range(-18.0..4.0))).collect();
        cs.extend([t.theta(1), t.theta(1) * 0.5, 10.0 * t.theta(M_MAX)]);
        for c in cs {
            assert_eq!(norm_branch(c, &t, M_MAX), scan_norm(c, &t), "c = {c}");
        }
    }
}

#[test]
fn tiny_norm_needs_no_scaling() {
    let t = table(Tolerance::Double);
    let c = 0.9 * t.theta(1);
    let (m, s) = norm_branch(c, &t, M_MAX);
    assert_eq!((m, s), (1, 1));
    let c = 0.5 * t.theta(10);
    let (m, s) = norm_branch(c, &t, M_MAX);
    assert_eq!(s, 1);
    assert!(t.theta(m) >= c && t.theta(m - 1) < c);
}

#[test]
fn alpha_branch_matches_scan() {
    let mut r = rng(42);
    let t = table(Tolerance::Double);
    for _ in 0..300 {
        let top = 10f64.powf(r.gen_range(-3.0..3.0));
        let mut alpha = vec![0.0; 9];
        for a in alpha.iter_mut().skip(2) {
            *a = top * r.gen_range(0.05..1.0);
        }
        let (m, s, cost) = alpha_branch(|p| alpha[p], &t, M_MAX, 8);
        let (best, m_scan) = scan_alpha(&alpha, &t, 8);
        assert_eq!((cost, m), (best, m_scan));
        assert_eq!(s, (cost / m).max(1));
    }
}

#[test]
fn signed_diagonal_above_crossover() {
    let t = table(Tolerance::Double);
    let c = 10.0 * t.theta(M_MAX);
    let a = MatrixOperator::diagonal(&[1.0, -1.0, 1.0, -1.0]);
    let (op, _) = shift(&a).unwrap();
    let choice = select_parameters(op, c, 1, &t, &SelectionOptions::default()).unwrap();
    assert_eq!(choice.path, SelectionPath::AlphaBased);
    let (m, s) = scan_norm(c, &t);
    assert_eq!((choice.m_star, choice.s), (m, s));
    assert_eq!(choice.s, (c / t.theta(choice.m_star)).ceil() as usize);
}

#[test]
fn small_norm_takes_norm_branch() {
    let t = table(Tolerance::Double);
    let a = MatrixOperator::diagonal(&[1.0, -1.0]);
    let choice = select_parameters(ShiftedOperator::unshifted(&a), 0.5, 1, &t, &SelectionOptions::default()).unwrap();
    assert_eq!(choice.path, SelectionPath::NormBased);
    assert_eq!(choice.estimation_mv(), 0);
    assert_eq!((choice.m_star, choice.s), scan_norm(0.5, &t));
    assert_eq!(choice.cost_mv, choice.m_star * choice.s);
}

#[test]
fn chosen_cost_beats_every_admissible_pair() {
    let mut r = rng(43);
    let t = table(Tolerance::Double);
    for _ in 0..20 {
        let a = random_upper(&mut r, 20, 2.0);
        let (op, _) = shift(&a).unwrap();
        let tt = 5.0;
        let c = select_parameters(op, tt, 1, &t, &SelectionOptions::default()).unwrap();
        assert_eq!(c.path, SelectionPath::AlphaBased);
        for p in 2..=8 {
            let al = tt * c.alpha.alpha(p).unwrap();
            for m in (p * (p - 1) - 1)..=M_MAX {
                let cost = m as f64 * (al / t.theta(m)).ceil();
                assert!(c.cost_mv as f64 <= cost);
            }
        }
    }
}

#[test]
fn rejects_bad_options() {
    let t = table(Tolerance::Double);
    let a = MatrixOperator::<f64>::identity(2);
    let bad = SelectionOptions { p_max: 9, ..Default::default() };
    assert!(select_parameters(ShiftedOperator::unshifted(&a), 1.0, 1, &t, &bad).is_err());
    let bad = SelectionOptions { m_max: 0, ..Default::default() };
    assert!(select_parameters(ShiftedOperator::unshifted(&a), 1.0, 1, &t, &bad).is_err());
    assert!(select_parameters(ShiftedOperator::unshifted(&a), -1.0, 1, &t, &SelectionOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_branch_cost_never_above_any_degree(c in 1e-12f64..1e4) {
        let t = table(Tolerance::Double);
        let (m, s) = norm_branch(c, &t, M_MAX);
        prop_assert!(s >= 1);
        prop_assert!(t.theta(m) * s as f64 >= c);
        for k in 1..=M_MAX {
            prop_assert!(m * s <= k * (c / t.theta(k)).ceil().max(1.0) as usize);
        }
    }

    #[test]
    fn unit_scalar_leaves_choice_unchanged(seed in 0u64..5000, phase in 0.0f64..6.3) {
        let mut r = rng(seed);
        let a = random_complex(&mut r, 8, 1.0);
        let beta = Complex64::from_polar(1.0, phase);
        let b = a.map(|z| z * beta).unwrap();
        let t = table(Tolerance::Double);
        let opts = SelectionOptions::default();
        let (op, _) = shift(&a).unwrap();
        let (opb, _) = shift(&b).unwrap();
        let c1 = select_parameters(op, 3.0, 1, &t, &opts).unwrap();
        let c2 = select_parameters(opb, 3.0, 1, &t, &opts).unwrap();
        prop_assert_eq!((c1.m_star, c1.s), (c2.m_star, c2.s));
    }
}
