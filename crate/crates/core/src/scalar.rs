//! Scalar abstraction shared by every numeric module.
//!
//! All weights, distances and bounds in the crate are generic over [`Scalar`],
//! which is implemented for `f32` and `f64`. The root module exposes `f64`
//! aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type usable as a weight, distance or bound.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute tolerance for membership, deduplication and ε comparisons.
    fn tol() -> Self;

    /// Converts an `f64` literal. Panics only if the type cannot represent
    /// finite `f64` values at all, which never happens for `f32`/`f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    // 1e-9 is below f32 resolution near 1.
    fn tol() -> Self {
        1e-5
    }
}

/// `a <= b` up to the scalar tolerance.
pub(crate) fn le_tol<T: Scalar>(a: T, b: T) -> bool {
    a <= b + T::tol()
}

/// `|a - b| <= tol`.
pub(crate) fn close<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= T::tol()
}

/// `%g`-style rendering with 12 significant digits.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_fraction(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
