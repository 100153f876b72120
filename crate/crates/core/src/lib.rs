//! Construction and desk verification of complex hypersurfaces with constant
//! relative nullity.
//!
//! The library builds hypersurfaces in C^{n+1} (and, through cones, in
//! CP^{n+1}) from anti-holomorphic base immersions, predicts their singular
//! sets and shape operators from closed-form data, and cross-checks every
//! prediction against independent differentiation oracles.
//!
//! All core math is generic over the scalar (`f32`/`f64`); the `*64`/`*32`
//! aliases below pick a concrete precision.

pub mod complex_linalg;
pub mod error;
pub mod gallery;
pub mod gauss_param;
pub mod immersion;
pub mod involution;
pub mod projective;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CVector64 = complex_linalg::CVector<f64>;
pub type CVector32 = complex_linalg::CVector<f32>;
pub type CSubspace64 = complex_linalg::CSubspace<f64>;
pub type Immersion64 = immersion::ParametricImmersion<f64>;
pub type Immersion32 = immersion::ParametricImmersion<f32>;
pub type Jet64 = immersion::Jet<f64>;
