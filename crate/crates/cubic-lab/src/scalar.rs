//! Scalar abstraction for the floating-point numerics.
//!
//! The arithmetic of `Z[ω]` is exact and lives on integers; only the analytic
//! layer (special functions, smooth weights, local Euler factors) is written
//! against [`Real`] so that it can be instantiated at `f32` or `f64`. The
//! L-value and moment harness fixes `f64` through the aliases below.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable by the generic numerics: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Send + Sync + std::fmt::Debug + 'static {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Default real scalar.
pub type Float64 = f64;
/// Default complex scalar.
pub type Complex64 = num_complex::Complex64;
