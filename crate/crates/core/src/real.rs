//! Scalar abstraction for evaluation math: f32 or f64.

use std::fmt;

/// Floating-point scalar used for utilities, playout values and game values.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an i32 known to be representable (unit stats, frame counts).
#[inline]
pub fn from_i32<F: Real>(v: i32) -> F {
    F::from_i32(v).expect("i32 representable in scalar type")
}

/// Converts an f64 constant (tolerances, literals).
#[inline]
pub fn from_f64<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("f64 constant representable in scalar type")
}
