//! Real scalar abstraction. Everything numeric in this crate is generic over
//! `T: Scalar`; complex entries are `Complex<T>`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar, implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal or tolerance into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Scalar>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Scalar>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
