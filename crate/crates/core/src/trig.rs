//! cos, sin, cosh, sinh and exp actions built on the Taylor kernel.
//!
//! Every pair comes out of one kernel call. For a real matrix the cos/sin
//! pair uses the rotation coupler and never leaves real arithmetic.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::kernel::{action, ActionOptions, ActionResult, TimeCoupler};
use crate::operator::{ActsOn, MatrixOperator};
use crate::params::SelectionPath;
use crate::scalar::Scalar;
use crate::theta::ThetaTable;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrigFn {
    Cos,
    Sin,
    Cosh,
    Sinh,
    Exp,
}

impl TrigFn {
    pub const ALL: [TrigFn; 5] = [TrigFn::Cos, TrigFn::Sin, TrigFn::Cosh, TrigFn::Sinh, TrigFn::Exp];

    pub fn name(self) -> &'static str {
        match self {
            TrigFn::Cos => "cos",
            TrigFn::Sin => "sin",
            TrigFn::Cosh => "cosh",
            TrigFn::Sinh => "sinh",
            TrigFn::Exp => "exp",
        }
    }

    /// Scalar reference value `f(z)`.
    pub fn eval(self, z: Complex64) -> Complex64 {
        match self {
            TrigFn::Cos => z.cos(),
            TrigFn::Sin => z.sin(),
            TrigFn::Cosh => z.cosh(),
            TrigFn::Sinh => z.sinh(),
            TrigFn::Exp => z.exp(),
        }
    }
}

impl fmt::Display for TrigFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrigFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TrigFn::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::Unsupported(format!("unknown function '{s}'")))
    }
}

/// Run statistics shared by all recipes.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionStats {
    pub mv: usize,
    pub estimation_mv: usize,
    pub m_star: usize,
    pub s: usize,
    pub stage_degrees: Vec<usize>,
    pub path: SelectionPath,
    pub mu: Complex64,
    pub warnings: Vec<String>,
}

impl ActionStats {
    pub fn total_mv(&self) -> usize {
        self.mv + self.estimation_mv
    }

    /// Combined counts of runs made one after another.
    pub fn merge(runs: &[ActionStats]) -> ActionStats {
        let mut out = runs[0].clone();
        for r in &runs[1..] {
            out.mv += r.mv;
            out.estimation_mv += r.estimation_mv;
            out.stage_degrees.extend_from_slice(&r.stage_degrees);
            out.warnings.extend(r.warnings.iter().cloned());
        }
        out
    }
}

impl<T: Scalar> From<&ActionResult<T>> for ActionStats {
    fn from(r: &ActionResult<T>) -> Self {
        ActionStats {
            mv: r.mv,
            estimation_mv: r.estimation_mv,
            m_star: r.m_star,
            s: r.s,
            stage_degrees: r.stage_degrees.clone(),
            path: r.params.path,
            mu: r.params.mu,
            warnings: r.params.warnings.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PairResult<T: Scalar> {
    pub first: BlockVector<T>,
    pub second: BlockVector<T>,
    pub stats: ActionStats,
}

#[derive(Clone, Debug)]
pub struct FourResult {
    pub cos: BlockVector<Complex64>,
    pub sin: BlockVector<Complex64>,
    pub cosh: BlockVector<Complex64>,
    pub sinh: BlockVector<Complex64>,
    pub stats: ActionStats,
}

/// `[V/2, V/2, …]`, `copies` panels.
fn halved_copies<T: Scalar>(v: &BlockVector<T>, copies: usize) -> Result<BlockVector<T>> {
    let half = v.scaled(T::from_real(0.5));
    let refs: Vec<&BlockVector<T>> = std::iter::repeat(&half).take(copies).collect();
    BlockVector::hcat(&refs)?.with_panel_width(v.ncols())
}

fn finish<T: Scalar>(x: BlockVector<T>, n0: usize) -> BlockVector<T> {
    x.with_panel_width(n0).expect("panel width divides")
}

/// `(cosh(tA)V, sinh(tA)V)` from `B = [V/2, V/2]`, `D = diag(t, −t)`.
pub fn cosh_sinh_action<S, T>(
    a: &MatrixOperator<S>,
    v: &BlockVector<T>,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairResult<T>>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T>,
{
    let n0 = v.ncols();
    let d = TimeCoupler::real_diagonal(&[t, -t], n0)?;
    let b = halved_copies(v, 2)?;
    let r = action(&d, a, &b, table, opts)?;
    let (f1, f2) = (r.f.panel(0), r.f.panel(1));
    Ok(PairResult {
        first: finish(f1.add(&f2), n0),
        second: finish(f1.sub(&f2), n0),
        stats: ActionStats::from(&r),
    })
}

/// `(cos(tA)V, sin(tA)V)`. A real operator uses the rotation coupler with
/// `B = [V, 0]`; a complex operator uses `D = diag(it, −it)`.
pub fn cos_sin_action<S, T>(
    a: &MatrixOperator<S>,
    v: &BlockVector<T>,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairResult<T>>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T> + ActsOn<Complex64>,
{
    if S::IS_COMPLEX {
        if !T::IS_COMPLEX {
            return Err(Error::contract("complex operator needs a complex block"));
        }
        let vc = v.map(Scalar::to_complex);
        let r = complex_cos_sin(a, &vc, t, table, opts)?;
        let back = |x: BlockVector<Complex64>| -> BlockVector<T> {
            x.map(|z| T::from_complex(z).expect("complex block"))
        };
        return Ok(PairResult {
            first: back(r.first),
            second: back(r.second),
            stats: r.stats,
        });
    }
    let n0 = v.ncols();
    let d = TimeCoupler::rotation(vec![t], n0)?;
    let zero = BlockVector::zeros(v.nrows(), n0);
    let b = BlockVector::hcat(&[v, &zero])?;
    let r = action(&d, a, &b, table, opts)?;
    Ok(PairResult {
        first: finish(r.f.panel(0), n0),
        second: finish(r.f.panel(1), n0),
        stats: ActionStats::from(&r),
    })
}

/// `(cos(tA)V, sin(tA)V)` through `e^{±itA}` in complex arithmetic,
/// for any operator.
pub fn complex_cos_sin<S>(
    a: &MatrixOperator<S>,
    v: &BlockVector<Complex64>,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<PairResult<Complex64>>
where
    S: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<Complex64>,
{
    let n0 = v.ncols();
    let d = TimeCoupler::diagonal(vec![Complex64::new(0.0, t), Complex64::new(0.0, -t)], n0)?;
    let b = halved_copies(v, 2)?;
    let r = action(&d, a, &b, table, opts)?;
    let (f1, f2) = (r.f.panel(0), r.f.panel(1));
    let minus_i = Complex64::new(0.0, -1.0);
    Ok(PairResult {
        first: finish(f1.add(&f2), n0),
        second: finish(f1.sub(&f2).scaled(minus_i), n0),
        stats: ActionStats::from(&r),
    })
}

/// cos, sin, cosh and sinh of `tA` on `V` from one kernel call with
/// `D = diag(t, −t, it, −it)`.
pub fn all_four_action<S, T>(
    a: &MatrixOperator<S>,
    v: &BlockVector<T>,
    t: f64,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<FourResult>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<Complex64>,
{
    let n0 = v.ncols();
    let tau = vec![
        Complex64::new(t, 0.0),
        Complex64::new(-t, 0.0),
        Complex64::new(0.0, t),
        Complex64::new(0.0, -t),
    ];
    let d = TimeCoupler::diagonal(tau, n0)?;
    let b = halved_copies(&v.map(Scalar::to_complex), 4)?;
    let r = action(&d, a, &b, table, opts)?;
    let f: Vec<BlockVector<Complex64>> = (0..4).map(|k| r.f.panel(k)).collect();
    let minus_i = Complex64::new(0.0, -1.0);
    Ok(FourResult {
        cosh: finish(f[0].add(&f[1]), n0),
        sinh: finish(f[0].sub(&f[1]), n0),
        cos: finish(f[2].add(&f[3]), n0),
        sin: finish(f[2].sub(&f[3]).scaled(minus_i), n0),
        stats: ActionStats::from(&r),
    })
}

/// `[e^{τ₁A}B₁, …, e^{τ_qA}B_q]` where `B` holds `q` panels of equal width.
pub fn expmv_multi<S, T>(
    a: &MatrixOperator<S>,
    b: &BlockVector<T>,
    tau: &[Complex64],
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<(BlockVector<T>, ActionStats)>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T>,
{
    if tau.is_empty() || b.ncols() % tau.len() != 0 {
        return Err(Error::dims(format!(
            "{} columns cannot be split into {} panels",
            b.ncols(),
            tau.len()
        )));
    }
    let n0 = b.ncols() / tau.len();
    let d = TimeCoupler::diagonal(tau.to_vec(), n0)?;
    let r = action(&d, a, &b.clone().with_panel_width(n0)?, table, opts)?;
    let stats = ActionStats::from(&r);
    Ok((r.f, stats))
}
