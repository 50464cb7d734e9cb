//! Scalar abstraction over `f64` and `Complex64`.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Default
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    /// Narrowing conversion; `None` when `c` has a nonzero imaginary part
    /// and `Self` is real.
    fn from_complex(c: Complex64) -> Option<Self>;
    fn to_complex(self) -> Complex64;
    fn abs(self) -> f64;
    fn conj(self) -> Self;
    fn scale(self, x: f64) -> Self;
    fn is_finite(self) -> bool;
    /// `x / |x|`, with `sign(0) = 1`.
    fn sign(self) -> Self;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_complex(c: Complex64) -> Option<Self> {
        (c.im == 0.0).then_some(c.re)
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn sign(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn from_complex(c: Complex64) -> Option<Self> {
        Some(c)
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    #[inline]
    fn sign(self) -> Self {
        let a = self.norm();
        if a == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / a
        }
    }
}
