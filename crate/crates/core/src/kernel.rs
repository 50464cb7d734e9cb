//! Truncated-Taylor action `F(D, A, B) ≈ Σ_k A^k B D^k / k!` with s-fold
//! composition, early termination and the trace shift.

use num_complex::Complex64;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::operator::{ActsOn, LinearMap, MatrixOperator, ShiftedOperator};
use crate::params::{self, ParameterChoice, SelectionOptions, SelectionPath};
use crate::scalar::Scalar;
use crate::theta::ThetaTable;

/// Stage norms beyond this multiple of `‖B‖_∞` abort the run.
pub const OVERFLOW_FACTOR: f64 = 1e300;

#[derive(Clone, Debug, PartialEq)]
pub enum CouplerKind {
    /// `diag(τ₁, …, τ_q)`.
    Diagonal(Vec<Complex64>),
    /// Blocks `[[0, t], [−t, 0]]`, one per entry; each spans two time slots.
    Rotation(Vec<f64>),
}

/// The right multiplier `D(τ) ⊗ I_{n0}`. Columns are time-major: time slot
/// `k` owns columns `k·n0 .. (k+1)·n0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeCoupler {
    kind: CouplerKind,
    n0: usize,
}

impl TimeCoupler {
    pub fn diagonal(tau: Vec<Complex64>, n0: usize) -> Result<Self> {
        Self::new(CouplerKind::Diagonal(tau), n0)
    }

    pub fn real_diagonal(tau: &[f64], n0: usize) -> Result<Self> {
        Self::diagonal(tau.iter().map(|&x| Complex64::new(x, 0.0)).collect(), n0)
    }

    pub fn rotation(t: Vec<f64>, n0: usize) -> Result<Self> {
        Self::new(CouplerKind::Rotation(t), n0)
    }

    fn new(kind: CouplerKind, n0: usize) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::contract("Kronecker width n0 must be at least 1"));
        }
        let finite = match &kind {
            CouplerKind::Diagonal(v) => !v.is_empty() && v.iter().all(|z| z.is_finite()),
            CouplerKind::Rotation(v) => !v.is_empty() && v.iter().all(|x| x.is_finite()),
        };
        if !finite {
            return Err(Error::contract("time values must be finite and nonempty"));
        }
        Ok(TimeCoupler { kind, n0 })
    }

    pub fn kind(&self) -> &CouplerKind {
        &self.kind
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Time slots before Kronecker expansion.
    pub fn slots(&self) -> usize {
        match &self.kind {
            CouplerKind::Diagonal(v) => v.len(),
            CouplerKind::Rotation(v) => 2 * v.len(),
        }
    }

    /// Expanded column count `q`.
    pub fn width(&self) -> usize {
        self.slots() * self.n0
    }

    pub fn t_max(&self) -> f64 {
        match &self.kind {
            CouplerKind::Diagonal(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            CouplerKind::Rotation(v) => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }

    /// Whether right multiplication keeps real blocks real.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            CouplerKind::Diagonal(v) => v.iter().all(|z| z.im == 0.0),
            CouplerKind::Rotation(_) => true,
        }
    }

    /// `D(βτ)`.
    pub fn scaled(&self, beta: Complex64) -> Result<Self> {
        let kind = match &self.kind {
            CouplerKind::Diagonal(v) => CouplerKind::Diagonal(v.iter().map(|z| z * beta).collect()),
            CouplerKind::Rotation(v) => {
                if beta.im != 0.0 {
                    return Err(Error::contract("rotation coupler needs a real scale"));
                }
                CouplerKind::Rotation(v.iter().map(|x| x * beta.re).collect())
            }
        };
        Self::new(kind, self.n0)
    }

    /// `X ← X · D · factor` in place.
    fn right_multiply<T: Scalar>(&self, x: &mut BlockVector<T>, factor: f64) -> Result<()> {
        let n0 = self.n0;
        match &self.kind {
            CouplerKind::Diagonal(tau) => {
                for (k, &tk) in tau.iter().enumerate() {
                    let scale = T::from_complex(tk * factor).ok_or_else(complex_on_real)?;
                    for c in 0..n0 {
                        x.column_mut(k * n0 + c).iter_mut().for_each(|v| *v *= scale);
                    }
                }
            }
            CouplerKind::Rotation(ts) => {
                for (k, &t) in ts.iter().enumerate() {
                    let tf = T::from_real(t * factor);
                    for c in 0..n0 {
                        let (xc, yc) = x.column_pair_mut(2 * k * n0 + c, (2 * k + 1) * n0 + c);
                        for (a, b) in xc.iter_mut().zip(yc.iter_mut()) {
                            let (xa, yb) = (*a, *b);
                            *a = -(tf * yb);
                            *b = tf * xa;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn complex_on_real() -> Error {
    Error::contract("complex time values or shift need a complex block")
}

/// Closed form of `J = e^{μD/s}`.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplerExp {
    /// `e^{μτ_k/s}` per time slot.
    Diagonal(Vec<Complex64>),
    /// `(cos φ_k, sin φ_k)` with `φ_k = μ t_k / s`, i.e. the block
    /// `[[cos, sin], [−sin, cos]]`.
    Rotation(Vec<(f64, f64)>),
}

impl CouplerExp {
    /// Dense `slots × slots` matrix, column-major.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let (q, entries): (usize, Vec<(usize, usize, Complex64)>) = match self {
            CouplerExp::Diagonal(v) => (v.len(), v.iter().enumerate().map(|(k, &z)| (k, k, z)).collect()),
            CouplerExp::Rotation(v) => (
                2 * v.len(),
                v.iter()
                    .enumerate()
                    .flat_map(|(k, &(c, s))| {
                        let (i, j) = (2 * k, 2 * k + 1);
                        [
                            (i, i, Complex64::new(c, 0.0)),
                            (i, j, Complex64::new(s, 0.0)),
                            (j, i, Complex64::new(-s, 0.0)),
                            (j, j, Complex64::new(c, 0.0)),
                        ]
                    })
                    .collect(),
            ),
        };
        let mut out = vec![Complex64::new(0.0, 0.0); q * q];
        for (i, j, z) in entries {
            out[j * q + i] = z;
        }
        out
    }

    fn is_identity(&self) -> bool {
        match self {
            CouplerExp::Diagonal(v) => v.iter().all(|&z| z == Complex64::new(1.0, 0.0)),
            CouplerExp::Rotation(v) => v.iter().all(|&(c, s)| c == 1.0 && s == 0.0),
        }
    }

    /// `X ← X · J` in place.
    fn right_multiply<T: Scalar>(&self, x: &mut BlockVector<T>, n0: usize) -> Result<()> {
        if self.is_identity() {
            return Ok(());
        }
        match self {
            CouplerExp::Diagonal(v) => {
                for (k, &z) in v.iter().enumerate() {
                    let scale = T::from_complex(z).ok_or_else(complex_on_real)?;
                    for c in 0..n0 {
                        x.column_mut(k * n0 + c).iter_mut().for_each(|e| *e *= scale);
                    }
                }
            }
            CouplerExp::Rotation(v) => {
                for (k, &(cs, sn)) in v.iter().enumerate() {
                    let (cs, sn) = (T::from_real(cs), T::from_real(sn));
                    for c in 0..n0 {
                        let (xc, yc) = x.column_pair_mut(2 * k * n0 + c, (2 * k + 1) * n0 + c);
                        for (a, b) in xc.iter_mut().zip(yc.iter_mut()) {
                            let (xa, yb) = (*a, *b);
                            *a = cs * xa - sn * yb;
                            *b = sn * xa + cs * yb;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn coupler_exp(d: &TimeCoupler, mu: Complex64, s: usize) -> Result<CouplerExp> {
    if s == 0 {
        return Err(Error::contract("scaling s must be at least 1"));
    }
    let inv_s = 1.0 / s as f64;
    match d.kind() {
        CouplerKind::Diagonal(tau) => Ok(CouplerExp::Diagonal(
            tau.iter().map(|&t| (mu * t * inv_s).exp()).collect(),
        )),
        CouplerKind::Rotation(ts) => {
            if mu.im != 0.0 {
                return Err(Error::contract("rotation coupler requires a real shift"));
            }
            Ok(CouplerExp::Rotation(
                ts.iter()
                    .map(|&t| {
                        let phi = mu.re * t * inv_s;
                        (phi.cos(), phi.sin())
                    })
                    .collect(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionOptions {
    pub selection: SelectionOptions,
    /// Subtract `μ = trace(A)/n` before the series.
    pub shift: bool,
    /// Stop a stage once two consecutive terms are negligible.
    pub early_exit: bool,
    /// Fixed `(m★, s)` instead of the selection.
    pub force: Option<(usize, usize)>,
}

impl Default for ActionOptions {
    fn default() -> Self {
        ActionOptions {
            selection: SelectionOptions::default(),
            shift: true,
            early_exit: true,
            force: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ActionResult<T: Scalar> {
    pub f: BlockVector<T>,
    /// Single-column products in the Taylor stages. A real operator acting
    /// on a complex column counts two.
    pub mv: usize,
    /// Products spent estimating `α_p`.
    pub estimation_mv: usize,
    pub s: usize,
    pub m_star: usize,
    /// Degree reached in each stage.
    pub stage_degrees: Vec<usize>,
    pub params: ParameterChoice,
}

impl<T: Scalar> ActionResult<T> {
    pub fn total_mv(&self) -> usize {
        self.mv + self.estimation_mv
    }
}

/// Computes `F(D(τ), A, B)`.
pub fn action<S, T>(
    d: &TimeCoupler,
    a: &MatrixOperator<S>,
    b: &BlockVector<T>,
    table: &ThetaTable,
    opts: &ActionOptions,
) -> Result<ActionResult<T>>
where
    S: Scalar,
    T: Scalar,
    MatrixOperator<S>: ActsOn<S> + ActsOn<T>,
{
    if b.nrows() != a.n() {
        return Err(Error::dims(format!(
            "block has {} rows, operator is {n}x{n}",
            b.nrows(),
            n = a.n()
        )));
    }
    if b.ncols() != d.width() {
        return Err(Error::dims(format!(
            "block has {} columns, coupler expects {}",
            b.ncols(),
            d.width()
        )));
    }
    if !b.all_finite() {
        return Err(Error::contract("right-hand side has non-finite entries"));
    }
    if !T::IS_COMPLEX && !d.is_real() {
        return Err(complex_on_real());
    }
    let (shifted, mu) = if opts.shift {
        params::shift(a)?
    } else {
        (ShiftedOperator::unshifted(a), S::zero())
    };
    if !T::IS_COMPLEX && S::IS_COMPLEX {
        return Err(Error::contract("complex operator needs a complex block"));
    }
    let q = b.ncols();
    let t = d.t_max();
    let params = match opts.force {
        Some((m, s)) => {
            if s == 0 {
                return Err(Error::contract("forced scaling must be at least 1"));
            }
            ParameterChoice {
                m_star: m,
                s,
                mu: mu.to_complex(),
                cost_mv: m * s,
                path: SelectionPath::Forced,
                scaled_norm: t * shifted.one_norm().unwrap_or(f64::NAN),
                alpha: Default::default(),
                warnings: Vec::new(),
            }
        }
        None => params::select_parameters(shifted, t, q, table, &opts.selection)?,
    };
    let (m_star, s) = (params.m_star, params.s);
    let jexp = coupler_exp(d, mu.to_complex(), s)?;
    let tol = table.tol();
    let per_column = <MatrixOperator<S> as ActsOn<T>>::REAL_PRODUCTS_PER_COLUMN;

    let b0_norm = b.inf_norm();
    let mut f = b.clone();
    let mut mv = 0usize;
    let mut stage_degrees = Vec::with_capacity(s);
    let mut bk = b.clone();
    for stage in 0..s {
        let mut c1 = bk.inf_norm();
        let mut degree = 0;
        for j in 1..=m_star {
            let mut next: BlockVector<T> = shifted.apply_block(&bk)?;
            mv += q * per_column;
            d.right_multiply(&mut next, 1.0 / (s * j) as f64)?;
            degree = j;
            let c2 = next.inf_norm();
            f.add_assign(&next);
            bk = next;
            if opts.early_exit && c1 + c2 <= tol * f.inf_norm() {
                break;
            }
            c1 = c2;
        }
        jexp.right_multiply(&mut f, d.n0())?;
        stage_degrees.push(degree);
        let fnorm = f.inf_norm();
        if !fnorm.is_finite() || fnorm > OVERFLOW_FACTOR * b0_norm {
            return Err(Error::Overflow {
                stage: stage + 1,
                stages: s,
            });
        }
        bk = f.clone();
    }

    Ok(ActionResult {
        f: f.with_panel_width(d.n0())?,
        mv,
        estimation_mv: params.estimation_mv(),
        s,
        m_star,
        stage_degrees,
        params,
    })
}
