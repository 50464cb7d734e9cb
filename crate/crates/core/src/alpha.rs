//! Estimates of `d_p = ‖A^p‖₁^{1/p}` and `α_p = max(d_p, d_{p+1})` through
//! a randomized block 1-norm power estimator.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::operator::{ActsOn, LinearMap, MatrixOperator, ShiftedOperator};
use crate::scalar::Scalar;

pub const DEFAULT_SEED: u64 = 0x7269_676d_7600_0001;
pub const DEFAULT_P_MAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    /// Block width of the estimator.
    pub columns: usize,
    /// Iteration cap.
    pub itmax: usize,
    /// Relative change of the estimate in the last iteration above which a
    /// capped run counts as unconverged.
    pub stall_tol: f64,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            columns: 2,
            itmax: 5,
            stall_tol: 1e-3,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Single-column operator applications spent.
    pub mv: usize,
    /// False when the iteration cap was hit while the estimate was still
    /// moving by more than `stall_tol`.
    pub converged: bool,
}

fn apply_power<T: Scalar, M: LinearMap<T>>(op: &M, x: &BlockVector<T>, p: usize, adjoint: bool) -> Result<BlockVector<T>> {
    let mut y = x.clone();
    for _ in 0..p {
        y = if adjoint {
            op.adjoint_apply_block(&y)?
        } else {
            op.apply_block(&y)?
        };
    }
    Ok(y)
}

fn column_one_norms<T: Scalar>(y: &BlockVector<T>) -> Vec<f64> {
    (0..y.ncols())
        .map(|j| y.column(j).iter().map(|v| v.abs()).sum())
        .collect()
}

fn random_sign_column<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<T> {
    (0..n)
        .map(|_| T::from_real(if rng.gen::<bool>() { scale } else { -scale }))
        .collect()
}

/// Whether two ±1 columns are parallel, i.e. `|xᵀy| = n`.
fn parallel<T: Scalar>(x: &[T], y: &[T]) -> bool {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| (*a * *b).to_complex().re).sum();
    dot.abs() == x.len() as f64
}

/// Estimate of `‖A^p‖₁` where `A` is given as a linear map with adjoint.
///
/// Dimensions up to the block width are handled exactly by applying `A^p`
/// to the identity.
pub fn normest_power<T: Scalar, M: LinearMap<T>>(op: &M, p: usize, cfg: &EstimatorConfig) -> Result<NormEstimate> {
    if p == 0 {
        return Err(Error::contract("power must be at least 1"));
    }
    if cfg.columns == 0 {
        return Err(Error::contract("estimator needs at least one column"));
    }
    let n = op.dim();
    if n == 0 {
        return Ok(NormEstimate {
            value: 0.0,
            mv: 0,
            converged: true,
        });
    }
    if n <= cfg.columns {
        let eye = BlockVector::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() });
        let y = apply_power(op, &eye, p, false)?;
        return Ok(NormEstimate {
            value: y.one_norm(),
            mv: p * n,
            converged: true,
        });
    }

    let t = cfg.columns;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (p as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let inv_n = 1.0 / n as f64;
    let mut columns: Vec<Vec<T>> = vec![vec![T::from_real(inv_n); n]];
    while columns.len() < t {
        let mut c = random_sign_column::<T>(&mut rng, n, inv_n);
        let mut tries = 0;
        while !T::IS_COMPLEX && columns.iter().any(|prev| parallel(prev, &c)) && tries < 100 {
            c = random_sign_column(&mut rng, n, inv_n);
            tries += 1;
        }
        columns.push(c);
    }
    let mut x = BlockVector::from_columns(&columns)?;

    let mut mv = 0usize;
    let mut est_old = 0.0f64;
    let mut est: f64;
    let mut ind: Vec<usize> = (0..n).collect();
    let mut ind_best = 0usize;
    let mut ind_hist: Vec<usize> = Vec::new();
    let mut s_old: Option<BlockVector<T>> = None;
    let mut converged = true;

    let mut k = 1usize;
    loop {
        let y = apply_power(op, &x, p, false)?;
        mv += p * t;
        let norms = column_one_norms(&y);
        let (jbest, &ybest) = norms
            .iter()
            .enumerate()
            .fold((0, &norms[0]), |acc, (j, v)| if *v > *acc.1 { (j, v) } else { acc });
        est = ybest;
        if est > est_old || k == 2 {
            ind_best = ind[jbest];
        }
        if k >= 2 && est <= est_old {
            est = est_old;
            break;
        }
        let growth = (est - est_old) / est;
        est_old = est;
        if k > cfg.itmax {
            converged = growth <= cfg.stall_tol;
            break;
        }

        let mut s = y.map(Scalar::sign);
        if !T::IS_COMPLEX {
            if let Some(prev) = &s_old {
                let all_parallel = (0..t).all(|j| (0..t).any(|i| parallel(s.column(j), prev.column(i))));
                if all_parallel {
                    break;
                }
            }
            if t > 1 {
                for j in 0..t {
                    let mut tries = 0;
                    loop {
                        let clash = (0..j).any(|i| parallel(s.column(j), s.column(i)))
                            || s_old
                                .as_ref()
                                .is_some_and(|prev| (0..t).any(|i| parallel(s.column(j), prev.column(i))));
                        if !clash || tries >= 100 {
                            break;
                        }
                        let c = random_sign_column::<T>(&mut rng, n, 1.0);
                        s.column_mut(j).copy_from_slice(&c);
                        tries += 1;
                    }
                }
            }
        }

        let z = apply_power(op, &s, p, true)?;
        mv += p * t;
        let h: Vec<f64> = (0..n)
            .map(|i| (0..t).map(|j| z.get(i, j).abs()).fold(0.0, f64::max))
            .collect();
        let hmax = h.iter().cloned().fold(0.0, f64::max);
        if k >= 2 && hmax == h[ind_best] {
            break;
        }
        ind = (0..n).collect();
        ind.sort_by(|&a, &b| h[b].partial_cmp(&h[a]).unwrap_or(std::cmp::Ordering::Equal));
        if t > 1 {
            if ind[..t].iter().all(|i| ind_hist.contains(i)) {
                break;
            }
            let fresh: Vec<usize> = ind.iter().copied().filter(|i| !ind_hist.contains(i)).collect();
            if fresh.len() < t {
                break;
            }
            let rest: Vec<usize> = ind.iter().copied().filter(|i| !fresh[..t].contains(i)).collect();
            ind = fresh[..t].iter().copied().chain(rest).collect();
        }
        x = BlockVector::from_fn(n, t, |i, j| if i == ind[j] { T::one() } else { T::zero() });
        ind_hist.extend_from_slice(&ind[..t]);
        s_old = Some(s);
        k += 1;
    }

    Ok(NormEstimate {
        value: est,
        mv,
        converged,
    })
}

/// Exact `‖A^p‖₁` for an entrywise nonnegative real operator:
/// `‖A^p‖₁ = ‖(Aᵀ)^p 1‖_∞`, at `p` products.
pub fn nonnegative_power_norm<M: LinearMap<f64>>(op: &M, p: usize) -> Result<NormEstimate> {
    let ones = BlockVector::from_vec(vec![1.0; op.dim()])?;
    let z = apply_power(op, &ones, p, true)?;
    Ok(NormEstimate {
        value: z.max_abs(),
        mv: p,
        converged: true,
    })
}

/// Memoized `d_p` estimates for a shifted operator `A − μI`.
pub struct AlphaCache<'a, S: Scalar> {
    op: ShiftedOperator<'a, S>,
    config: EstimatorConfig,
    p_max: usize,
    nonnegative: bool,
    d: BTreeMap<usize, f64>,
    mv: usize,
    degraded: bool,
}

impl<'a, S: Scalar> AlphaCache<'a, S>
where
    MatrixOperator<S>: ActsOn<S>,
{
    pub fn new(op: ShiftedOperator<'a, S>, config: EstimatorConfig, p_max: usize) -> Result<Self> {
        if p_max < 2 {
            return Err(Error::contract(format!("p_max = {p_max} must be at least 2")));
        }
        let nonnegative = op.is_nonnegative();
        Ok(AlphaCache {
            op,
            config,
            p_max,
            nonnegative,
            d: BTreeMap::new(),
            mv: 0,
            degraded: false,
        })
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn mv_used(&self) -> usize {
        self.mv
    }

    /// True if any estimate hit the iteration cap.
    pub fn degraded(&self) -> bool {
        self.degraded
    }

    /// `‖Ã^p‖₁^{1/p}`, memoized.
    pub fn d(&mut self, p: usize) -> Result<f64> {
        if let Some(&v) = self.d.get(&p) {
            return Ok(v);
        }
        let est = if p == 1 {
            NormEstimate {
                value: self.op.one_norm()?,
                mv: 0,
                converged: true,
            }
        } else if self.nonnegative {
            self.nonnegative_norm(p)?
        } else {
            normest_power::<S, _>(&self.op, p, &self.config)?
        };
        self.mv += est.mv;
        self.degraded |= !est.converged;
        let v = est.value.powf(1.0 / p as f64);
        self.d.insert(p, v);
        Ok(v)
    }

    fn nonnegative_norm(&self, p: usize) -> Result<NormEstimate> {
        let ones = BlockVector::from_vec(vec![S::one(); self.op.base().n()])?;
        let z = apply_power(&self.op, &ones, p, true)?;
        Ok(NormEstimate {
            value: z.max_abs(),
            mv: p,
            converged: true,
        })
    }

    /// `α_p = max(d_p, d_{p+1})` for `2 <= p <= p_max`.
    pub fn alpha(&mut self, p: usize) -> Result<f64> {
        if p < 2 || p > self.p_max {
            return Err(Error::contract(format!("p = {p} outside 2..={}", self.p_max)));
        }
        Ok(self.d(p)?.max(self.d(p + 1)?))
    }

    pub fn summary(&self) -> AlphaSummary {
        AlphaSummary {
            d: self.d.iter().map(|(&p, &v)| (p, v)).collect(),
            mv: self.mv,
            degraded: self.degraded,
        }
    }
}

/// Snapshot of an [`AlphaCache`] after parameter selection.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlphaSummary {
    /// `(p, d_p)` pairs that were evaluated.
    pub d: Vec<(usize, f64)>,
    pub mv: usize,
    pub degraded: bool,
}

impl AlphaSummary {
    pub fn d(&self, p: usize) -> Option<f64> {
        self.d.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    pub fn alpha(&self, p: usize) -> Option<f64> {
        Some(self.d(p)?.max(self.d(p + 1)?))
    }
}
