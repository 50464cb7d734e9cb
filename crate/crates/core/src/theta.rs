//! Truncation backward error of the degree-m Taylor approximant and the
//! thresholds θ_m derived from it.
//!
//! For `r = T_m` the backward error of `r(X) = exp(X + E)` is
//! `E = log(exp(-X) T_m(X)) = Σ_{i>m} c_i X^i`, bounded in norm by
//! `g(‖X‖) = Σ |c_i| ‖X‖^i`. θ_m is the largest θ with `g(θ)/θ <= tol`.
//!
//! The coefficients are computed exactly. Writing `L(x) = log T_m(x) - x`,
//! `L'(x) = T_{m-1}(x)/T_m(x) - 1 = -(x^m/m!) / T_m(x)`, so with
//! `1/T_m(x) = Σ u_k x^k` we get `c_{m+1+k} = -u_k / ((m+1+k) m!)`.
//! The scaled values `v_k = k! u_k` are integers obeying
//! `v_k = -Σ_{j=1}^{min(k,m)} C(k,j) v_{k-j}`, `v_0 = 1`.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::double_double::Dd;
use crate::error::{Error, Result};
use crate::theta_tables;

/// Largest Taylor degree used by the parameter selection.
pub const M_MAX: usize = 55;

/// Nonnegative extended-range number `mant · 2^exp2`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ExtFloat {
    pub mant: Dd,
    pub exp2: i64,
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat {
        mant: Dd::ZERO,
        exp2: 0,
    };

    /// `num/den` correctly truncated to about 110 bits.
    pub fn from_ratio(num: &BigUint, den: &BigUint) -> ExtFloat {
        if num.is_zero() {
            return ExtFloat::ZERO;
        }
        let shift = 110 - (num.bits() as i64 - den.bits() as i64);
        let q = if shift >= 0 {
            (num << shift as usize) / den
        } else {
            num / (den << (-shift) as usize)
        };
        let hi = q.to_f64().unwrap_or(f64::INFINITY);
        let hi_int = BigInt::from_biguint(Sign::Plus, q) - BigInt::from(hi as u128);
        let lo = hi_int.to_f64().unwrap_or(0.0);
        ExtFloat {
            mant: Dd::from_sum(hi, lo),
            exp2: -shift,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.hi == 0.0
    }

    /// log2 of the value (−∞ for zero).
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mant.to_f64().log2() + self.exp2 as f64
    }

    /// Nearest double; underflows to zero and overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        pow2_scale(self.mant.to_f64(), self.exp2)
    }
}

fn pow2_scale(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Magnitudes `|c_i|`, `i = m+1 ..= order`, of the backward error series.
#[derive(Clone, Debug)]
pub struct BackwardErrorSeries {
    m: usize,
    order: usize,
    coeffs: Vec<ExtFloat>,
}

impl BackwardErrorSeries {
    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `|c_i|`; zero for `i <= m` and for `i` beyond the truncation order.
    pub fn coefficient(&self, i: usize) -> ExtFloat {
        if i <= self.m || i > self.order {
            ExtFloat::ZERO
        } else {
            self.coeffs[i - self.m - 1]
        }
    }

    /// Index/magnitude pairs for the stored (nonzero-index) range.
    pub fn iter(&self) -> impl Iterator<Item = (usize, ExtFloat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.m + 1 + k, *c))
    }
}

/// Exact backward error coefficients of `T_m` up to `order`.
pub fn series_coefficients(m: usize, order: usize) -> Result<BackwardErrorSeries> {
    if m == 0 {
        return Err(Error::contract("Taylor degree must be at least 1"));
    }
    if order < m + 2 {
        return Err(Error::contract(format!(
            "series order {order} must be at least m + 2 = {}",
            m + 2
        )));
    }
    let kmax = order - m - 1;

    // Pascal rows C(k, 0..=m), built incrementally.
    let mut binom: Vec<BigInt> = vec![BigInt::zero(); m + 1];
    binom[0] = BigInt::one();
    let mut v: Vec<BigInt> = Vec::with_capacity(kmax + 1);
    v.push(BigInt::one());
    for k in 1..=kmax {
        for j in (1..=m.min(k)).rev() {
            let prev = binom[j - 1].clone();
            binom[j] += prev;
        }
        let mut acc = BigInt::zero();
        for j in 1..=m.min(k) {
            acc += &binom[j] * &v[k - j];
        }
        v.push(-acc);
    }

    let mut m_fact = BigUint::one();
    for j in 2..=m {
        m_fact *= j;
    }
    let mut k_fact = BigUint::one();
    let mut coeffs = Vec::with_capacity(kmax + 1);
    for (k, vk) in v.iter().enumerate() {
        if k > 0 {
            k_fact *= k;
        }
        let i = m + 1 + k;
        let den = &k_fact * &m_fact * BigUint::from(i);
        coeffs.push(ExtFloat::from_ratio(vk.magnitude(), &den));
    }
    Ok(BackwardErrorSeries { m, order, coeffs })
}

/// Value of the truncated bound together with an estimate of the
/// neglected tail.
#[derive(Copy, Clone, Debug)]
pub struct GValue {
    pub value: f64,
    pub tail: f64,
}

/// Terms `|c_i| θ^i` of the stored range (as doubles).
fn terms(series: &BackwardErrorSeries, theta: f64) -> Vec<f64> {
    let lt = theta.log2();
    series
        .iter()
        .map(|(i, c)| {
            if c.is_zero() {
                0.0
            } else {
                let e = c.log2() + i as f64 * lt;
                if e > 1000.0 {
                    f64::INFINITY
                } else {
                    e.exp2()
                }
            }
        })
        .collect()
}

const DECAY_WINDOW: usize = 10;

/// `g(θ) = Σ |c_i| θ^i` over the stored range, with an estimate of the
/// omitted tail. Decay is judged on the envelope of the last two windows of
/// ten terms, since complex zeros of `T_m` make the coefficients oscillate.
pub fn g_eval_with_tail(series: &BackwardErrorSeries, theta: f64) -> Result<GValue> {
    if theta < 0.0 || !theta.is_finite() {
        return Err(Error::contract(format!("theta = {theta} must be finite and >= 0")));
    }
    if theta == 0.0 {
        return Ok(GValue {
            value: 0.0,
            tail: 0.0,
        });
    }
    let t = terms(series, theta);
    let value: f64 = t.iter().sum();
    let exceeded = Error::RadiusExceeded {
        m: series.m,
        theta,
    };
    if !value.is_finite() {
        return Err(exceeded);
    }
    let w = DECAY_WINDOW.min(t.len() / 2);
    if w == 0 {
        return Ok(GValue { value, tail: 0.0 });
    }
    let last = t[t.len() - w..].iter().cloned().fold(0.0, f64::max);
    let before = t[t.len() - 2 * w..t.len() - w]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if before == 0.0 {
        return Ok(GValue { value, tail: last });
    }
    if last >= before {
        return Err(exceeded);
    }
    let r = (last / before).powf(1.0 / w as f64);
    Ok(GValue {
        value,
        tail: last * r / (1.0 - r),
    })
}

pub fn g_eval(series: &BackwardErrorSeries, theta: f64) -> Result<f64> {
    g_eval_with_tail(series, theta).map(|g| g.value)
}

/// Default extra series terms beyond the degree.
pub const DEFAULT_EXTRA_TERMS: usize = 60;
const MAX_EXTRA_TERMS: usize = 1500;
/// Largest relative change of `g(θ)/θ` the omitted terms may cause.
const SETTLE_RTOL: f64 = 1e-12;
/// Relative bisection width.
pub const BISECTION_RTOL: f64 = 1e-6;

/// θ_m for `tol`: the largest θ (to relative width 1e-6) with
/// `g(θ)/θ <= tol`. The series order starts at `m + 60` and grows while the
/// terms at the root are not decaying or the next chunk of terms adds more
/// than `SETTLE_RTOL · tol · θ`.
pub fn solve_theta(m: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::contract(format!("tolerance {tol} outside (0, 1)")));
    }
    let mut extra = DEFAULT_EXTRA_TERMS;
    let mut series = series_coefficients(m, m + extra)?;
    loop {
        let theta = bisect_theta(&series, tol)?;
        // The tail is measured, not extrapolated: the next chunk of terms
        // must be negligible and the envelope must be decaying.
        let longer = series_coefficients(m, m + extra + DEFAULT_EXTRA_TERMS)?;
        let g_short: f64 = terms(&series, theta).iter().sum();
        let settled = match g_eval_with_tail(&longer, theta) {
            Ok(g) => g.value - g_short <= SETTLE_RTOL * tol * theta,
            Err(_) => false,
        };
        if settled {
            return Ok(theta);
        }
        if extra >= MAX_EXTRA_TERMS {
            return Err(Error::ThetaGeneration {
                m,
                tol,
                reason: "series tail does not settle".into(),
            });
        }
        extra += DEFAULT_EXTRA_TERMS;
        series = longer;
    }
}

/// Sign of `g_N(θ)/θ - tol` for the truncated sum `g_N`, which is
/// monotone in θ; the caller checks the tail at the root.
fn excess(series: &BackwardErrorSeries, theta: f64, tol: f64) -> bool {
    let g: f64 = terms(series, theta).iter().sum();
    !(g / theta <= tol)
}

fn bisect_theta(series: &BackwardErrorSeries, tol: f64) -> Result<f64> {
    let m = series.m;
    // Leading-order root of θ^m / (m+1)! = tol.
    let log_fact: f64 = (2..=m + 1).map(|j| (j as f64).ln()).sum();
    let guess = ((tol.ln() + log_fact) / m as f64).exp();
    let fail = |reason: &str| Error::ThetaGeneration {
        m,
        tol,
        reason: reason.to_string(),
    };

    let mut lo = guess;
    let mut steps = 0;
    while excess(series, lo, tol) {
        lo *= 0.5;
        steps += 1;
        if steps > 200 {
            return Err(fail("no lower bracket"));
        }
    }
    let mut hi = lo * 2.0;
    steps = 0;
    while !excess(series, hi, tol) {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 200 || !hi.is_finite() {
            return Err(fail("no sign change in bracket"));
        }
    }
    while hi - lo > BISECTION_RTOL * lo {
        let mid = 0.5 * (lo + hi);
        if excess(series, mid, tol) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// The backward error tolerances with shipped tables, plus arbitrary values.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Tolerance {
    /// 2⁻¹¹
    Half,
    /// 2⁻²³
    Single,
    /// 2⁻⁵³
    Double,
    Custom(f64),
}

impl Tolerance {
    pub fn value(self) -> f64 {
        match self {
            Tolerance::Half => 2f64.powi(-11),
            Tolerance::Single => 2f64.powi(-23),
            Tolerance::Double => 2f64.powi(-53),
            Tolerance::Custom(t) => t,
        }
    }

    pub fn name(self) -> String {
        match self {
            Tolerance::Half => "half".into(),
            Tolerance::Single => "single".into(),
            Tolerance::Double => "double".into(),
            Tolerance::Custom(t) => format!("{t:e}"),
        }
    }

    /// Parses `half`, `single`, `double`, or a positive number.
    pub fn parse(s: &str) -> Result<Tolerance> {
        match s {
            "half" => Ok(Tolerance::Half),
            "single" => Ok(Tolerance::Single),
            "double" => Ok(Tolerance::Double),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|t| *t > 0.0 && *t < 1.0)
                .map(Tolerance::Custom)
                .ok_or_else(|| Error::parse(0, format!("unknown tolerance {other:?}"))),
        }
    }

    pub const BUILTIN: [Tolerance; 3] = [Tolerance::Half, Tolerance::Single, Tolerance::Double];
}

/// θ_m for m = 1..=m_max at one tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaTable {
    tol: f64,
    theta: Vec<f64>,
}

impl ThetaTable {
    /// Shipped table for the built-in tolerances; generated on the fly
    /// (slow path) for custom ones.
    pub fn for_tolerance(tol: Tolerance) -> Result<ThetaTable> {
        let theta = match tol {
            Tolerance::Half => theta_tables::THETA_HALF.to_vec(),
            Tolerance::Single => theta_tables::THETA_SINGLE.to_vec(),
            Tolerance::Double => theta_tables::THETA_DOUBLE.to_vec(),
            Tolerance::Custom(t) => return ThetaTable::generate(t, M_MAX),
        };
        Ok(ThetaTable {
            tol: tol.value(),
            theta,
        })
    }

    /// Regenerates the table from the series, one thread per degree.
    pub fn generate(tol: f64, m_max: usize) -> Result<ThetaTable> {
        let results: Vec<Result<f64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (1..=m_max)
                .map(|m| scope.spawn(move || solve_theta(m, tol)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("theta worker panicked"))
                .collect()
        });
        let theta = results.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(ThetaTable { tol, theta })
    }

    pub fn from_values(tol: f64, theta: Vec<f64>) -> Result<ThetaTable> {
        if theta.is_empty() || theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::contract("theta values must be positive and finite"));
        }
        Ok(ThetaTable { tol, theta })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn m_max(&self) -> usize {
        self.theta.len()
    }

    /// θ_m, 1-based.
    #[inline]
    pub fn theta(&self, m: usize) -> f64 {
        self.theta[m - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    /// Versioned text form: header comments, then `m theta` per line with 17
    /// significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# theta-table v1");
        let _ = writeln!(s, "# tol {:.16e}", self.tol);
        let _ = writeln!(s, "# m theta");
        for (k, t) in self.theta.iter().enumerate() {
            let _ = writeln!(s, "{} {:.16e}", k + 1, t);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<ThetaTable> {
        let mut tol = None;
        let mut theta = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("tol") {
                    tol = Some(
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::parse(ln + 1, e.to_string()))?,
                    );
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let m: usize = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::parse(ln + 1, "missing degree"))?;
            let t: f64 = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::parse(ln + 1, "missing theta"))?;
            if m != theta.len() + 1 {
                return Err(Error::parse(ln + 1, format!("expected degree {}", theta.len() + 1)));
            }
            theta.push(t);
        }
        let tol = tol.ok_or_else(|| Error::parse(0, "missing '# tol' header"))?;
        ThetaTable::from_values(tol, theta)
    }

    /// Rust source for a constant array holding this table.
    pub fn to_rust_const(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "/// tol = {:e}", self.tol);
        let _ = writeln!(s, "pub const {name}: [f64; {}] = [", self.theta.len());
        for t in &self.theta {
            let _ = writeln!(s, "    {t:.16e},");
        }
        let _ = writeln!(s, "];");
        s
    }
}

/// Full generated source for the shipped tables module.
pub fn tables_module_source(half: &ThetaTable, single: &ThetaTable, double: &ThetaTable) -> String {
    let mut s = String::from(
        "// Generated by `trigmv theta-gen --rust`; do not edit by hand.\n\n",
    );
    s.push_str(&half.to_rust_const("THETA_HALF"));
    s.push('\n');
    s.push_str(&single.to_rust_const("THETA_SINGLE"));
    s.push('\n');
    s.push_str(&double.to_rust_const("THETA_DOUBLE"));
    s
}

/// Number of leading significant digits on which `a` and `b` agree.
pub fn agreeing_digits(a: f64, b: f64) -> f64 {
    if a == b {
        return f64::INFINITY;
    }
    -((a - b).abs() / a.abs().max(b.abs())).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_leading_coefficients() {
        let s = series_coefficients(1, 8).unwrap();
        assert_eq!(s.coefficient(1).to_f64(), 0.0);
        assert!((s.coefficient(2).to_f64() - 0.5).abs() < 1e-16);
        assert!((s.coefficient(3).to_f64() - 1.0 / 3.0).abs() < 1e-16);
        // log(1+x) - x: |c_i| = 1/i
        for i in 2..=8 {
            assert!((s.coefficient(i).to_f64() - 1.0 / i as f64).abs() < 1e-16);
        }
    }

    #[test]
    fn degree_two_leading_coefficient_is_one_sixth() {
        let s = series_coefficients(2, 5).unwrap();
        assert!((s.coefficient(3).to_f64() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn coefficients_vanish_up_to_degree() {
        for m in [1, 4, 17, 55] {
            let s = series_coefficients(m, m + 10).unwrap();
            for i in 0..=m {
                assert!(s.coefficient(i).is_zero());
            }
            assert!(!s.coefficient(m + 1).is_zero());
        }
    }

    #[test]
    fn order_too_small_is_rejected() {
        assert!(series_coefficients(5, 6).is_err());
    }

    #[test]
    fn g_at_zero_and_small_theta() {
        let s = series_coefficients(1, 61).unwrap();
        assert_eq!(g_eval(&s, 0.0).unwrap(), 0.0);
        let g = g_eval(&s, 1e-8).unwrap();
        assert!((g / 0.5e-16 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn g_is_monotone() {
        let s = series_coefficients(10, 70).unwrap();
        let mut prev = 0.0;
        for k in 1..40 {
            let th = 0.05 * k as f64;
            let g = g_eval(&s, th).unwrap();
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn g_beyond_radius_errors() {
        // T_1 = 1 + x vanishes at -1; the series diverges for θ >= 1.
        let s = series_coefficients(1, 80).unwrap();
        assert!(matches!(g_eval(&s, 1.5), Err(Error::RadiusExceeded { .. })));
    }

    #[test]
    fn theta_one_double_is_twice_tol() {
        let tol = 2f64.powi(-53);
        let th = solve_theta(1, tol).unwrap();
        assert!((th / (2.0 * tol) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn shipped_tables_are_nondecreasing_and_ordered() {
        for tol in Tolerance::BUILTIN {
            let t = ThetaTable::for_tolerance(tol).unwrap();
            assert_eq!(t.m_max(), M_MAX);
            assert!(t.values().windows(2).all(|w| w[0] <= w[1]));
        }
        let h = ThetaTable::for_tolerance(Tolerance::Half).unwrap();
        let s = ThetaTable::for_tolerance(Tolerance::Single).unwrap();
        let d = ThetaTable::for_tolerance(Tolerance::Double).unwrap();
        for m in 1..=M_MAX {
            assert!(h.theta(m) > s.theta(m));
            assert!(s.theta(m) > d.theta(m));
        }
    }

    #[test]
    fn text_round_trip() {
        let t = ThetaTable::for_tolerance(Tolerance::Single).unwrap();
        let back = ThetaTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(Tolerance::parse("double").unwrap(), Tolerance::Double);
        assert_eq!(Tolerance::parse("1e-10").unwrap(), Tolerance::Custom(1e-10));
        assert!(Tolerance::parse("quad").is_err());
        assert!(Tolerance::parse("2").is_err());
    }
}
