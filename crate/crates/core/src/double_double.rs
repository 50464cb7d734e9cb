//! Double-word ("double-double") arithmetic: an unevaluated sum `hi + lo`
//! with `|lo| <= ulp(hi)/2`, giving about 32 significant decimal digits.
//!
//! Error-free transformations follow Dekker and Knuth; products use FMA.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Copy, Clone, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiplication by a power of two (exact barring under/overflow).
    #[inline]
    pub fn ldexp(self, e: i32) -> Dd {
        let f = 2f64.powi(e);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = fast_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // One Newton step from the double approximation.
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = (self - Dd { hi: p, lo: e }).hi / (2.0 * x);
        Dd::from_sum(x, r)
    }

    pub fn powi(self, mut k: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = fast_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = fast_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = fast_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = fast_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    #[inline]
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    #[inline]
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

/// Complex number with double-double parts.
#[derive(Copy, Clone, Default, PartialEq, Debug)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_c64(z: num_complex::Complex64) -> Self {
        DdComplex {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// |re| + |im|, a cheap norm used for termination tests.
    pub fn abs1(self) -> f64 {
        self.re.to_f64().abs() + self.im.to_f64().abs()
    }

    pub fn scale(self, a: Dd) -> Self {
        DdComplex {
            re: self.re * a,
            im: self.im * a,
        }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn add(self, b: Self) -> Self {
        DdComplex {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn sub(self, b: Self) -> Self {
        DdComplex {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn neg(self) -> Self {
        DdComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn mul(self, b: Self) -> Self {
        DdComplex {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl AddAssign for DdComplex {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_keeps_low_order_bits() {
        let a = Dd::from_f64(1.0) + Dd::from_f64(1e-20);
        let b = a - Dd::from_f64(1.0);
        assert_eq!(b.to_f64(), 1e-20);
    }

    #[test]
    fn third_times_three_is_one() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let r = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = Dd::from_f64(2.0).sqrt();
        assert!((s * s - Dd::from_f64(2.0)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn summation_order_independent() {
        let terms: Vec<Dd> = (1..=10_000u32)
            .map(|k| Dd::ONE / Dd::from_f64(f64::from(k)))
            .collect();
        let fwd = terms.iter().fold(Dd::ZERO, |a, &t| a + t);
        let bwd = terms.iter().rev().fold(Dd::ZERO, |a, &t| a + t);
        assert!((fwd - bwd).to_f64().abs() < 1e-28);
        let f: f64 = (1..=10_000u32).map(|k| 1.0 / f64::from(k)).sum();
        let b: f64 = (1..=10_000u32).rev().map(|k| 1.0 / f64::from(k)).sum();
        assert!((f - b).abs() > 1e-16);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dd::from_f64(1.1);
        let mut r = Dd::ONE;
        for _ in 0..13 {
            r = r * x;
        }
        assert!((x.powi(13) - r).to_f64().abs() < 1e-28);
    }
}
