//! Scalar abstraction so the whole library runs on `f32` or `f64`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Real scalar the library is generic over: `f32` or `f64`.
pub trait Real: RealField + Num + FromPrimitive + ToPrimitive + Copy {}

impl<T: RealField + Num + FromPrimitive + ToPrimitive + Copy> Real for T {}

/// Shorthand conversion from an `f64` literal into the working scalar.
pub fn r<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must be representable in the scalar type")
}
