//! Scalar types accepted by the cleartext side of the engine.
//!
//! Matrices and vectors handed to the encoders can hold floats, machine
//! integers or exact rationals. All of them are turned into fixed-point
//! integers (`round(v * delta)`) before they reach a plaintext.

use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{Num, ToPrimitive};

/// Numeric type that can be placed in a plaintext slot after fixed-point scaling.
pub trait Scalar: Copy + Num + ToPrimitive + PartialOrd + Debug + Send + Sync + 'static {
    /// `round(self * scale)`, or `None` if the result does not fit an `i128`.
    fn to_fixed(self, scale: u128) -> Option<i128>;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($($t:ty)*) => ($(
        impl Scalar for $t {
            fn to_fixed(self, scale: u128) -> Option<i128> {
                let v = (self as f64 * scale as f64).round();
                if v.is_finite() && v.abs() < 1.0e37 { Some(v as i128) } else { None }
            }
        }
    )*)
}

macro_rules! int_scalar {
    ($($t:ty)*) => ($(
        impl Scalar for $t {
            fn to_fixed(self, scale: u128) -> Option<i128> {
                (self as i128).checked_mul(i128::try_from(scale).ok()?)
            }
        }
    )*)
}

float_scalar!(f32 f64);
int_scalar!(i32 i64);

impl Scalar for Rational64 {
    fn to_fixed(self, scale: u128) -> Option<i128> {
        let num = (*self.numer() as i128).checked_mul(i128::try_from(scale).ok()?)?;
        let den = *self.denom() as i128;
        // round half away from zero
        let q = num / den;
        let r = num % den;
        Some(if 2 * r.abs() >= den.abs() { q + num.signum() * den.signum() } else { q })
    }
}
