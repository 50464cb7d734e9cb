//! Benchmark driver comparing the paired kernel with two baselines:
//! separate exponential actions, and the exponential of the `2n×2n`
//! first-order block form.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::harness::generators::{GeneratorSpec, SeparableFactor};
use crate::harness::reference::SeparableReference;
use crate::io::{AnyBlock, AnyOperator};
use crate::kernel::{action, ActionOptions, TimeCoupler};
use crate::operator::{ActsOn, MatrixOperator};
use crate::oracle::{dense_f_operator, MAX_ORACLE_DIM};
use crate::scalar::Scalar;
use crate::theta::{ThetaTable, Tolerance};
use crate::trig::{cos_sin_action, cosh_sinh_action, expmv_multi, ActionStats, TrigFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionPair {
    CosSin,
    CoshSinh,
}

impl FunctionPair {
    pub fn name(self) -> &'static str {
        match self {
            FunctionPair::CosSin => "cos,sin",
            FunctionPair::CoshSinh => "cosh,sinh",
        }
    }

    pub fn functions(self) -> [TrigFn; 2] {
        match self {
            FunctionPair::CosSin => [TrigFn::Cos, TrigFn::Sin],
            FunctionPair::CoshSinh => [TrigFn::Cosh, TrigFn::Sinh],
        }
    }

    /// The pair containing `f`.
    pub fn containing(f: TrigFn) -> Option<FunctionPair> {
        match f {
            TrigFn::Cos | TrigFn::Sin => Some(FunctionPair::CosSin),
            TrigFn::Cosh | TrigFn::Sinh => Some(FunctionPair::CoshSinh),
            TrigFn::Exp => None,
        }
    }
}

impl FromStr for FunctionPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pair = None;
        for f in s.split(',').filter(|p| !p.trim().is_empty()) {
            let f: TrigFn = f.parse()?;
            let p = FunctionPair::containing(f)
                .ok_or_else(|| Error::Unsupported("benchmarks cover cos/sin and cosh/sinh".into()))?;
            if pair.is_some_and(|q| q != p) {
                return Err(Error::Unsupported(format!("'{s}' mixes trigonometric and hyperbolic functions")));
            }
            pair = Some(p);
        }
        pair.ok_or_else(|| Error::Unsupported("empty function list".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchMethod {
    /// Both functions from one paired kernel call.
    Trig,
    /// Separate exponential actions with one time value each.
    TrigExpmv,
    /// Exponential of the first-order block system.
    TrigBlock,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 3] = [BenchMethod::Trig, BenchMethod::TrigExpmv, BenchMethod::TrigBlock];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Trig => "trig",
            BenchMethod::TrigExpmv => "trig_expmv",
            BenchMethod::TrigBlock => "trig_block",
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchMethod::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Unsupported(format!("unknown method '{s}'")))
    }
}

/// A matrix, right-hand side and optional separable structure.
#[derive(Clone, Debug)]
pub struct BenchCase {
    pub label: String,
    pub op: AnyOperator,
    pub rhs: AnyBlock,
    pub separable: Option<SeparableFactor>,
}

impl BenchCase {
    pub fn generated(spec: &GeneratorSpec) -> Result<Self> {
        let g = spec.generate()?;
        Ok(BenchCase {
            label: spec.to_string(),
            op: AnyOperator::Real(g.op),
            rhs: AnyBlock::Real(g.rhs),
            separable: spec.separable_factor(),
        })
    }

    pub fn from_parts(label: impl Into<String>, op: AnyOperator, rhs: AnyBlock) -> Result<Self> {
        if op.n() != rhs.nrows() {
            return Err(Error::dims(format!("operator is {0}x{0}, block has {1} rows", op.n(), rhs.nrows())));
        }
        Ok(BenchCase {
            label: label.into(),
            op,
            rhs,
            separable: None,
        })
    }

    /// `(f₁(tA)b, f₂(tA)b)` from the separable reference or, for small
    /// operators, the dense oracle.
    pub fn reference(&self, pair: FunctionPair, t: f64) -> Result<Option<[BlockVector<Complex64>; 2]>> {
        let [f1, f2] = pair.functions();
        if let (Some(factor), AnyBlock::Real(_)) = (&self.separable, &self.rhs) {
            let r = SeparableReference::new(factor)?;
            return Ok(Some([r.action(f1, t), r.action(f2, t)]));
        }
        if self.op.n() > MAX_ORACLE_DIM {
            return Ok(None);
        }
        let apply = |f: TrigFn| -> Result<BlockVector<Complex64>> {
            let d = match &self.op {
                AnyOperator::Real(a) => dense_f_operator(a, f, t)?,
                AnyOperator::Complex(a) => dense_f_operator(a, f, t)?,
            };
            d.apply(&self.rhs.to_complex())
        };
        match (apply(f1), apply(f2)) {
            (Ok(a), Ok(b)) => Ok(Some([a, b])),
            (Err(Error::OracleUnavailable(_)), _) | (_, Err(Error::OracleUnavailable(_))) => Ok(None),
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }
}

/// One row of benchmark output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub matrix: String,
    pub n: usize,
    pub functions: String,
    pub method: String,
    pub t: f64,
    pub tol: String,
    /// All single-column real products, estimation included.
    pub mv: usize,
    /// The part of `mv` spent estimating `α_p`.
    pub mv_estimate: usize,
    pub wall_time_s: f64,
    /// `‖(f₁ + i f₂) − (r₁ + i r₂)‖₁ / ‖r₁ + i r₂‖₁` when a reference exists.
    pub rel_err: Option<f64>,
    pub m_star: usize,
    pub s: usize,
}

/// Output of one method on one case.
#[derive(Clone, Debug)]
pub struct PairRun {
    pub first: BlockVector<Complex64>,
    pub second: BlockVector<Complex64>,
    pub mv: usize,
    pub estimation_mv: usize,
    pub m_star: usize,
    pub s: usize,
}

impl PairRun {
    fn from_stats(first: BlockVector<Complex64>, second: BlockVector<Complex64>, st: &ActionStats) -> Self {
        PairRun {
            first,
            second,
            mv: st.total_mv(),
            estimation_mv: st.estimation_mv,
            m_star: st.m_star,
            s: st.s,
        }
    }

    /// `f₁ + i·f₂`.
    pub fn combined(&self) -> BlockVector<Complex64> {
        combine(&self.first, &self.second)
    }
}

fn combine(a: &BlockVector<Complex64>, b: &BlockVector<Complex64>) -> BlockVector<Complex64> {
    a.add(&b.scaled(Complex64::new(0.0, 1.0)))
}

pub fn run_method(
    case: &BenchCase,
    pair: FunctionPair,
    method: BenchMethod,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairRun> {
    macro_rules! dispatch {
        ($f:ident) => {
            match (&case.op, &case.rhs) {
                (AnyOperator::Real(a), AnyBlock::Real(b)) => $f(a, b, pair, t, table, opts),
                (AnyOperator::Real(a), AnyBlock::Complex(b)) => $f(a, b, pair, t, table, opts),
                (AnyOperator::Complex(a), b) => $f(a, &b.to_complex(), pair, t, table, opts),
            }
        };
    }
    match method {
        BenchMethod::Trig => dispatch!(paired),
        BenchMethod::TrigExpmv => dispatch!(separate_exponentials),
        BenchMethod::TrigBlock => dispatch!(block_form),
    }
}

/// Runs one method and scores it against the reference.
pub fn bench_one(
    case: &BenchCase,
    pair: FunctionPair,
    method: BenchMethod,
    t: f64,
    tol: Tolerance,
    opts: &ActionOptions,
) -> Result<BenchRecord> {
    let table = ThetaTable::for_tolerance(tol)?;
    let start = Instant::now();
    let run = run_method(case, pair, method, t, &table, opts)?;
    let wall = start.elapsed().as_secs_f64();
    let rel_err = case
        .reference(pair, t)?
        .map(|[r1, r2]| run.combined().rel_diff(&combine(&r1, &r2)));
    Ok(BenchRecord {
        matrix: case.label.clone(),
        n: case.op.n(),
        functions: pair.name().to_string(),
        method: method.name().to_string(),
        t,
        tol: tol.name(),
        mv: run.mv,
        mv_estimate: run.estimation_mv,
        wall_time_s: wall,
        rel_err,
        m_star: run.m_star,
        s: run.s,
    })
}

/// Runs every method on every case, one case at a time unless `parallel`.
pub fn bench(
    cases: &[(BenchCase, FunctionPair, f64)],
    methods: &[BenchMethod],
    tol: Tolerance,
    opts: &ActionOptions,
    parallel: bool,
) -> Vec<Result<BenchRecord>> {
    let jobs: Vec<_> = cases
        .iter()
        .flat_map(|(c, p, t)| methods.iter().map(move |&m| (c, *p, m, *t)))
        .collect();
    if !parallel {
        return jobs.into_iter().map(|(c, p, m, t)| bench_one(c, p, m, t, tol, opts)).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(c, p, m, t)| scope.spawn(move || bench_one(c, p, m, t, tol, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::contract("benchmark worker panicked"))))
            .collect()
    })
}

/// The generated problems of the large-matrix experiments with their time
/// values.
pub fn large_cases() -> Vec<(GeneratorSpec, FunctionPair, f64)> {
    use FunctionPair::*;
    let triw = GeneratorSpec::Triw { n: 2000, alpha: 4.0 };
    let triu = GeneratorSpec::TriuUniform {
        n: 2000,
        seed: super::generators::DEFAULT_GENERATOR_SEED,
    };
    vec![
        (triw, CosSin, 10.0),
        (triu, CosSin, 40.0),
        (GeneratorSpec::Laplace2d { n: 99 }, CosSin, 0.25),
        (triw, CoshSinh, 10.0),
        (triu, CoshSinh, 40.0),
        (GeneratorSpec::Transport1d { n: 1000 }, CoshSinh, 2.0),
        (GeneratorSpec::Schrodinger3dSplit { n: 30 }, CosSin, 0.5),
    ]
}

fn paired<S, T>(
    a: &MatrixOperator<S>,
    b: &BlockVector<T>,
    pair: FunctionPair,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairRun>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T> + ActsOn<Complex64>,
{
    let r = match pair {
        FunctionPair::CosSin => cos_sin_action(a, b, t, table, opts)?,
        FunctionPair::CoshSinh => cosh_sinh_action(a, b, t, table, opts)?,
    };
    Ok(PairRun::from_stats(r.first.to_complex(), r.second.to_complex(), &r.stats))
}

/// `e^{τA}b` once per time value. The second call reuses the degree and
/// scaling of the first, so estimation is paid once.
fn separate_exponentials<S, T>(
    a: &MatrixOperator<S>,
    b: &BlockVector<T>,
    pair: FunctionPair,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairRun>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T> + ActsOn<Complex64>,
{
    let i = Complex64::new(0.0, 1.0);
    if pair == FunctionPair::CosSin && !S::IS_COMPLEX && !T::IS_COMPLEX {
        // e^{itA}b = cos(tA)b + i sin(tA)b for real A and b
        let (u, st) = expmv_multi(a, &b.to_complex(), &[i * t], table, opts)?;
        return Ok(PairRun::from_stats(u.re().to_complex(), u.im().to_complex(), &st));
    }
    let (plus, minus) = match pair {
        FunctionPair::CosSin => (i * t, -i * t),
        FunctionPair::CoshSinh => (Complex64::new(t, 0.0), Complex64::new(-t, 0.0)),
    };
    let (u1, u2, st) = if pair == FunctionPair::CoshSinh && !T::IS_COMPLEX {
        let (u1, u2, st) = exponential_pair(a, b, plus, minus, table, opts)?;
        (u1.to_complex(), u2.to_complex(), st)
    } else {
        exponential_pair(a, &b.to_complex(), plus, minus, table, opts)?
    };
    let half = Complex64::new(0.5, 0.0);
    let (first, second) = match pair {
        FunctionPair::CosSin => (u1.add(&u2).scaled(half), u1.sub(&u2).scaled(-half * i)),
        FunctionPair::CoshSinh => (u1.add(&u2).scaled(half), u1.sub(&u2).scaled(half)),
    };
    Ok(PairRun::from_stats(first, second, &st))
}

fn exponential_pair<S, U>(
    a: &MatrixOperator<S>,
    b: &BlockVector<U>,
    plus: Complex64,
    minus: Complex64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<(BlockVector<U>, BlockVector<U>, ActionStats)>
where
    S: Scalar,
    U: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<U>,
{
    let (u1, s1) = expmv_multi(a, b, &[plus], table, opts)?;
    let forced = ActionOptions {
        force: Some((s1.m_star, s1.s)),
        ..opts.clone()
    };
    let (u2, s2) = expmv_multi(a, b, &[minus], table, &forced)?;
    Ok((u1, u2, ActionStats::merge(&[s1, s2])))
}

/// `A²` as triplets.
fn square_triplets<S: Scalar>(a: &MatrixOperator<S>) -> Result<Vec<(usize, usize, S)>> {
    let n = a.n();
    let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
    a.for_each_entry(|i, j, v| {
        if v != S::zero() {
            cols[j].push((i, v));
        }
    })?;
    let mut acc = vec![S::zero(); n];
    let mut mark = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut out = Vec::new();
    for j in 0..n {
        touched.clear();
        for &(k, akj) in &cols[j] {
            for &(i, aik) in &cols[k] {
                if mark[i] != j {
                    mark[i] = j;
                    acc[i] = S::zero();
                    touched.push(i);
                }
                acc[i] += aik * akj;
            }
        }
        out.extend(touched.iter().map(|&i| (i, j, acc[i])));
    }
    Ok(out)
}

/// `W = [[0, I], [σA², 0]]`, so that `e^{tW}[0; b]` holds
/// `[A⁻¹ sin(tA)b; cos(tA)b]` for `σ = −1` and the hyperbolic analogue for
/// `σ = 1`.
pub fn block_operator<S: Scalar>(a: &MatrixOperator<S>, sigma: f64) -> Result<MatrixOperator<S>> {
    let n = a.n();
    let sq = square_triplets(a)?;
    let mut t = Vec::with_capacity(n + sq.len());
    t.extend((0..n).map(|i| (i, n + i, S::one())));
    let sigma = S::from_real(sigma);
    t.extend(sq.into_iter().map(|(i, j, v)| (n + i, j, sigma * v)));
    MatrixOperator::from_triplets(2 * n, &t)
}

/// Each product with `W` is charged as two products with `A`; recovering
/// the second function from `A⁻¹f₂(tA)b` costs one more.
fn block_form<S, T>(
    a: &MatrixOperator<S>,
    b: &BlockVector<T>,
    pair: FunctionPair,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairRun>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T> + ActsOn<Complex64>,
{
    let n = a.n();
    let q = b.ncols();
    let sigma = match pair {
        FunctionPair::CosSin => -1.0,
        FunctionPair::CoshSinh => 1.0,
    };
    let w = block_operator(a, sigma)?;
    let stacked = BlockVector::from_fn(2 * n, q, |i, j| if i < n { T::zero() } else { b.get(i - n, j) });
    let d = TimeCoupler::real_diagonal(&[t], q)?;
    let r = action(&d, &w, &stacked, table, opts)?;
    let top = BlockVector::from_fn(n, q, |i, j| r.f.get(i, j));
    let second = a.apply(&top)?;
    let first = BlockVector::from_fn(n, q, |i, j| r.f.get(n + i, j));
    let recover = q * <MatrixOperator<S> as ActsOn<T>>::REAL_PRODUCTS_PER_COLUMN;
    Ok(PairRun {
        first: first.to_complex(),
        second: second.to_complex(),
        mv: 2 * r.total_mv() + recover,
        estimation_mv: 2 * r.estimation_mv,
        m_star: r.m_star,
        s: r.s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double() -> ThetaTable {
        ThetaTable::for_tolerance(Tolerance::Double).unwrap()
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("sin,cos".parse::<FunctionPair>().unwrap(), FunctionPair::CosSin);
        assert_eq!("cosh".parse::<FunctionPair>().unwrap(), FunctionPair::CoshSinh);
        assert!("cos,sinh".parse::<FunctionPair>().is_err());
        assert!("exp".parse::<FunctionPair>().is_err());
        assert_eq!("trig_block".parse::<BenchMethod>().unwrap(), BenchMethod::TrigBlock);
    }

    #[test]
    fn square_matches_dense_product() {
        let a = MatrixOperator::dense_from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, -1.0, 3.0], vec![4.0, 0.0, 0.5]])
            .unwrap();
        let sq = MatrixOperator::from_triplets(3, &square_triplets(&a).unwrap()).unwrap();
        let d = a.to_dense();
        let mut want = vec![0.0; 9];
        for j in 0..3 {
            for i in 0..3 {
                want[j * 3 + i] = (0..3).map(|k| d[k * 3 + i] * d[j * 3 + k]).sum();
            }
        }
        assert_eq!(sq.to_dense(), want);
    }

    #[test]
    fn all_methods_agree_with_oracle() {
        let case = BenchCase::generated(&GeneratorSpec::TriuUniform { n: 12, seed: 3 }).unwrap();
        let opts = ActionOptions::default();
        for pair in [FunctionPair::CosSin, FunctionPair::CoshSinh] {
            let [r1, r2] = case.reference(pair, 2.0).unwrap().unwrap();
            for m in BenchMethod::ALL {
                let run = run_method(&case, pair, m, 2.0, &double(), &opts).unwrap();
                assert!(run.first.rel_diff(&r1) < 1e-12, "{m} {pair:?} first");
                assert!(run.second.rel_diff(&r2) < 1e-12, "{m} {pair:?} second");
            }
        }
    }

    #[test]
    fn complex_operator_baselines() {
        let a = MatrixOperator::dense_from_rows(&[
            vec![Complex64::new(0.3, 1.0), Complex64::new(0.0, -0.5)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(-0.2, 0.1)],
        ])
        .unwrap();
        let b = BlockVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let case = BenchCase::from_parts("c", AnyOperator::Complex(a), AnyBlock::Complex(b)).unwrap();
        for pair in [FunctionPair::CosSin, FunctionPair::CoshSinh] {
            let [r1, r2] = case.reference(pair, 1.5).unwrap().unwrap();
            for m in BenchMethod::ALL {
                let run = run_method(&case, pair, m, 1.5, &double(), &ActionOptions::default()).unwrap();
                assert!(run.first.rel_diff(&r1) < 1e-12 && run.second.rel_diff(&r2) < 1e-12, "{m}");
            }
        }
    }

    #[test]
    fn record_reports_total_mv() {
        let case = BenchCase::generated(&GeneratorSpec::Laplace1d { n: 20 }).unwrap();
        let rec = bench_one(
            &case,
            FunctionPair::CosSin,
            BenchMethod::Trig,
            0.01,
            Tolerance::Double,
            &ActionOptions::default(),
        )
        .unwrap();
        let run = run_method(&case, FunctionPair::CosSin, BenchMethod::Trig, 0.01, &double(), &ActionOptions::default())
            .unwrap();
        assert_eq!(rec.mv, run.mv);
        assert!(rec.mv >= rec.mv_estimate);
        assert!(rec.rel_err.unwrap() < 1e-13);
    }
}
