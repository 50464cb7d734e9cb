use trigmv::harness::{bench, bench_one, BenchCase, BenchMethod, FunctionPair, GeneratorSpec};
use trigmv::io::{AnyBlock, AnyOperator};
use trigmv::kernel::ActionOptions;
use trigmv::operator::MatrixOperator;
use trigmv::{BlockVector, Tolerance};

fn case(spec: &str) -> BenchCase {
    BenchCase::generated(&spec.parse::<GeneratorSpec>().unwrap()).unwrap()
}

#[test]
fn every_method_matches_reference() {
    let opts = ActionOptions::default();
    for (spec, pair, t) in [
        ("laplace2d:6", FunctionPair::CosSin, 0.05),
        ("transport1d:40", FunctionPair::CoshSinh, 0.5),
        ("triw:30", FunctionPair::CoshSinh, 1.0),
        ("rotationblock:10", FunctionPair::CosSin, 3.0),
    ] {
        let c = case(spec);
        for m in BenchMethod::ALL {
            let r = bench_one(&c, pair, m, t, Tolerance::Double, &opts).unwrap();
            let err = r.rel_err.expect("small cases have a reference");
            assert!(err < 1e-12, "{spec} {m}: {err:e}");
            assert!(r.mv >= r.mv_estimate);
        }
    }
}

#[test]
fn separable_reference_at_scale() {
    let c = case("schrodinger3d-split:12");
    assert!(c.separable.is_some());
    let r = bench_one(&c, FunctionPair::CosSin, BenchMethod::Trig, 0.5, Tolerance::Double, &ActionOptions::default())
        .unwrap();
    let err = r.rel_err.unwrap();
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn block_form_costs_more_on_laplacian() {
    let c = case("laplace2d:15");
    let opts = ActionOptions::default();
    let trig = bench_one(&c, FunctionPair::CosSin, BenchMethod::Trig, 0.1, Tolerance::Double, &opts).unwrap();
    let block = bench_one(&c, FunctionPair::CosSin, BenchMethod::TrigBlock, 0.1, Tolerance::Double, &opts).unwrap();
    assert!(trig.mv < block.mv, "{} vs {}", trig.mv, block.mv);
}

#[test]
fn sequential_and_parallel_agree() {
    let cases = vec![
        (case("laplace2d:5"), FunctionPair::CosSin, 0.1),
        (case("transport1d:30"), FunctionPair::CoshSinh, 1.0),
    ];
    let opts = ActionOptions::default();
    let a = bench(&cases, &BenchMethod::ALL, Tolerance::Single, &opts, false);
    let b = bench(&cases, &BenchMethod::ALL, Tolerance::Single, &opts, true);
    assert_eq!(a.len(), 6);
    for (x, y) in a.into_iter().zip(b) {
        let (x, y) = (x.unwrap(), y.unwrap());
        assert_eq!((x.mv, x.m_star, x.s, &x.method), (y.mv, y.m_star, y.s, &y.method));
        assert_eq!(x.tol, "single");
    }
}

#[test]
fn complex_inputs_run_through_every_method() {
    let a = MatrixOperator::diagonal(&[num_complex::Complex64::new(0.3, 1.0), num_complex::Complex64::new(-0.5, 0.2)]);
    let b = BlockVector::from_vec(vec![num_complex::Complex64::new(1.0, 0.0); 2]).unwrap();
    let c = BenchCase::from_parts("diag", AnyOperator::Complex(a), AnyBlock::Complex(b)).unwrap();
    for pair in [FunctionPair::CosSin, FunctionPair::CoshSinh] {
        for m in BenchMethod::ALL {
            let r = bench_one(&c, pair, m, 1.0, Tolerance::Double, &ActionOptions::default()).unwrap();
            assert!(r.rel_err.unwrap() < 1e-13, "{pair:?} {m}");
        }
    }
}
