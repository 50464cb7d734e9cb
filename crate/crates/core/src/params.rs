//! Choice of the Taylor degree m★ and the scaling s.

use num_complex::Complex64;

use crate::alpha::{AlphaCache, AlphaSummary, EstimatorConfig, DEFAULT_P_MAX};
use crate::error::{Error, Result};
use crate::operator::{ActsOn, MatrixOperator, ShiftedOperator};
use crate::scalar::Scalar;
use crate::theta::{ThetaTable, M_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionPath {
    /// `t‖Ã‖₁ = 0`.
    Zero,
    NormBased,
    AlphaBased,
    /// Supplied by the caller.
    Forced,
}

impl SelectionPath {
    pub fn name(self) -> &'static str {
        match self {
            SelectionPath::Zero => "zero",
            SelectionPath::NormBased => "norm",
            SelectionPath::AlphaBased => "alpha",
            SelectionPath::Forced => "forced",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionOptions {
    pub m_max: usize,
    pub p_max: usize,
    pub estimator: EstimatorConfig,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions {
            m_max: M_MAX,
            p_max: DEFAULT_P_MAX,
            estimator: EstimatorConfig::default(),
        }
    }
}

impl SelectionOptions {
    fn validate(&self, table: &ThetaTable) -> Result<()> {
        if self.m_max == 0 || self.m_max > table.m_max() {
            return Err(Error::contract(format!(
                "m_max = {} outside 1..={}",
                self.m_max,
                table.m_max()
            )));
        }
        if self.p_max < 2 || self.p_max * (self.p_max - 1) > self.m_max + 1 {
            return Err(Error::contract(format!(
                "p_max = {} needs 2 <= p_max and p_max(p_max-1) <= m_max + 1",
                self.p_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterChoice {
    pub m_star: usize,
    pub s: usize,
    pub mu: Complex64,
    /// Predicted products per column, `m★·s`.
    pub cost_mv: usize,
    pub path: SelectionPath,
    /// `t‖Ã‖₁`.
    pub scaled_norm: f64,
    pub alpha: AlphaSummary,
    pub warnings: Vec<String>,
}

impl ParameterChoice {
    /// Products spent estimating `α_p`.
    pub fn estimation_mv(&self) -> usize {
        self.alpha.mv
    }
}

/// `μ = trace(A)/n` and the implicitly shifted operator.
pub fn shift<S: Scalar>(a: &MatrixOperator<S>) -> Result<(ShiftedOperator<'_, S>, S)> {
    if a.n() == 0 {
        return Ok((ShiftedOperator::unshifted(a), S::zero()));
    }
    let mu = a.trace()?.scale(1.0 / a.n() as f64);
    Ok((ShiftedOperator::new(a, mu), mu))
}

/// `argmin_{1<=m<=m_max} m⌈c/θ_m⌉` with ties toward smaller m; returns
/// `(m, s)`.
pub fn norm_branch(c: f64, table: &ThetaTable, m_max: usize) -> (usize, usize) {
    let mut best = (usize::MAX, 1, 1);
    for m in 1..=m_max {
        let s = (c / table.theta(m)).ceil().max(1.0) as usize;
        let cost = m.saturating_mul(s);
        if cost < best.0 {
            best = (cost, m, s);
        }
    }
    (best.1, best.2)
}

/// Minimum of `m⌈α_p/θ_m⌉` over `2 <= p <= p_max`,
/// `p(p-1)-1 <= m <= m_max`, with `alpha(p)` already scaled by t.
/// Zero costs are ignored; the smallest minimizing m wins.
/// Returns `(m, s, cost)`.
pub fn alpha_branch(alpha: impl Fn(usize) -> f64, table: &ThetaTable, m_max: usize, p_max: usize) -> (usize, usize, usize) {
    let mut best: Option<(usize, usize)> = None;
    for m in 1..=m_max {
        for p in 2..=p_max {
            if p * (p - 1) - 1 > m {
                continue;
            }
            let cost = m as f64 * (alpha(p) / table.theta(m)).ceil();
            if cost == 0.0 {
                continue;
            }
            let cost = cost as usize;
            if best.map_or(true, |(c, _)| cost < c) {
                best = Some((cost, m));
            }
        }
    }
    match best {
        Some((cost, m)) => (m, (cost / m).max(1), cost),
        None => (1, 1, 1),
    }
}

/// Degree and scaling for `t·Ã` on a block of `q` columns.
pub fn select_parameters<S: Scalar>(
    op: ShiftedOperator<'_, S>,
    t: f64,
    q: usize,
    table: &ThetaTable,
    opts: &SelectionOptions,
) -> Result<ParameterChoice>
where
    MatrixOperator<S>: ActsOn<S>,
{
    opts.validate(table)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::contract(format!("t = {t} must be finite and >= 0")));
    }
    let q = q.max(1);
    let mu = op.mu().to_complex();
    let scaled_norm = t * op.one_norm()?;
    if scaled_norm == 0.0 {
        return Ok(ParameterChoice {
            m_star: 0,
            s: 1,
            mu,
            cost_mv: 0,
            path: SelectionPath::Zero,
            scaled_norm,
            alpha: AlphaSummary::default(),
            warnings: Vec::new(),
        });
    }
    let (m_max, p_max) = (opts.m_max, opts.p_max);
    let bound = 4.0 * table.theta(m_max) * (p_max * (p_max + 3)) as f64 / (m_max * q) as f64;
    let mut warnings = Vec::new();
    let mut summary = AlphaSummary::default();

    if scaled_norm > bound {
        let mut cache = AlphaCache::new(op, opts.estimator, p_max)?;
        let mut alphas = vec![0.0; p_max + 1];
        for (p, a) in alphas.iter_mut().enumerate().skip(2) {
            *a = t * cache.alpha(p)?;
        }
        summary = cache.summary();
        if !cache.degraded() {
            let (m, s, cost) = alpha_branch(|p| alphas[p], table, m_max, p_max);
            return Ok(ParameterChoice {
                m_star: m,
                s,
                mu,
                cost_mv: cost,
                path: SelectionPath::AlphaBased,
                scaled_norm,
                alpha: summary,
                warnings,
            });
        }
        warnings.push("norm estimator did not converge; using the 1-norm bound".to_string());
    }

    let (m, s) = norm_branch(scaled_norm, table, m_max);
    Ok(ParameterChoice {
        m_star: m,
        s,
        mu,
        cost_mv: m * s,
        path: SelectionPath::NormBased,
        scaled_norm,
        alpha: summary,
        warnings,
    })
}
