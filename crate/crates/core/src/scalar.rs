//! Floating-point abstraction shared by every model in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Real scalar used for pressures, conductances and times: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every literal in this crate fits in `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Default fixed-point tolerance in kPa, widened for short mantissas so
    /// that Picard iterates at supply-level pressures can still settle.
    fn default_tol() -> Self {
        let floor = Self::epsilon() * Self::lit(1.0e3);
        Self::lit(1.0e-6).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
