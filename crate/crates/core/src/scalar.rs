//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
///
/// The associated constants carry the numerical thresholds that depend on
/// the working precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Below this value of `|sin(pi * delta / 2)|` the Fejér kernel is
    /// evaluated through its limit.
    const KERNEL_SINGULARITY: f64;
    /// Largest condition number of the first-user Gram matrix accepted by
    /// the zero-forcing stage.
    const MAX_CONDITION: f64;
    /// Tolerance used to decide that a correlation equals one.
    const UNIT_TOLERANCE: f64;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every Real type")
    }
}

impl Real for f64 {
    const KERNEL_SINGULARITY: f64 = 1e-9;
    const MAX_CONDITION: f64 = 1e12;
    const UNIT_TOLERANCE: f64 = 1e-12;
}

impl Real for f32 {
    const KERNEL_SINGULARITY: f64 = 1e-5;
    const MAX_CONDITION: f64 = 1e5;
    const UNIT_TOLERANCE: f64 = 1e-5;
}
