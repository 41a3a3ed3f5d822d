//! Scalar abstractions.
//!
//! Every algorithm in the crate is written against [`Scalar`], which covers
//! real floats and complex numbers over them. The ambient space is always
//! treated as a *real* Euclidean space: complex vectors carry the inner
//! product `Re <x, y>`, so a complex point of dimension `n` behaves like a
//! real point of dimension `2n`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive, Zero};
use rustfft::FftNum;

/// Real floating point field used for norms, distances and constants.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum
    + Default
    + Display
    + LowerExp
    + NumAssign
{
    /// Relative eigenvalue gap below which a Gram matrix counts as singular.
    fn rank_tolerance() -> Self;

    /// Converts an `f64` literal. Panics only if the target cannot hold it,
    /// which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn rank_tolerance() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn rank_tolerance() -> Self {
        1e-6
    }
}

/// Entry type of a [`Point`](super::Point): a real float or a complex number.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    type Real: Real;

    /// `true` for complex scalars.
    const IS_COMPLEX: bool;
    /// Real coordinates per entry (1 or 2).
    const PARTS: usize;

    fn from_real(r: Self::Real) -> Self;
    /// Builds a scalar from real and imaginary parts; real scalars drop `im`.
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn modulus_sqr(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;
    fn is_finite(self) -> bool;

    #[inline]
    fn to_complex(self) -> Complex<Self::Real> {
        Complex::new(self.re(), self.im())
    }

    #[inline]
    fn from_complex(c: Complex<Self::Real>) -> Self {
        Self::from_parts(c.re, c.im)
    }
}

macro_rules! impl_real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;
            const PARTS: usize = 1;

            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn from_parts(re: $t, _im: $t) -> Self {
                re
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn modulus_sqr(self) -> $t {
                self * self
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                self * r
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

impl_real_scalar!(f32);
impl_real_scalar!(f64);

impl<R: Real> Scalar for Complex<R> {
    type Real = R;
    const IS_COMPLEX: bool = true;
    const PARTS: usize = 2;

    #[inline]
    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    #[inline]
    fn from_parts(re: R, im: R) -> Self {
        Complex::new(re, im)
    }
    #[inline]
    fn re(self) -> R {
        self.re
    }
    #[inline]
    fn im(self) -> R {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn modulus(self) -> R {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> R {
        self.norm_sqr()
    }
    #[inline]
    fn scale(self, r: R) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A real float usable both as a field and as a point entry.
pub trait RealScalar: Real + Scalar<Real = Self> {}

impl<T: Real + Scalar<Real = T>> RealScalar for T {}
