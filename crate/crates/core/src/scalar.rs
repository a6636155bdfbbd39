//! Scalar abstraction shared by every numerical module.
//!
//! All physics is written against [`Real`] so the same code runs in `f32`
//! or `f64`. The tolerances quoted throughout the crate (1e-10 residuals,
//! 1e-12 level gaps) only make sense in `f64`, which is what the aliases
//! at the crate root fix.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar usable by the laboratory.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count or index into `T`.
#[inline(always)]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Converts a signed index into `T`.
#[inline(always)]
pub fn from_i64<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("index representable in scalar type")
}

/// Lossy conversion to `f64` for reporting.
#[inline(always)]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Complex number over the crate scalar.
pub type Cplx<T> = Complex<T>;

#[inline(always)]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}
