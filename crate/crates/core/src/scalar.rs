use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Floating-point scalar accepted by the closed-form formulas.
///
/// Implemented for `f32` and `f64`. Geometry, inverse and spectral code is
/// `f64`-only because the tolerances it must meet are below `f32` epsilon.
pub trait Real: Float + FloatConst + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from(x).expect("literal representable in every supported float")
    }
}

impl<T> Real for T where T: Float + FloatConst + Debug + Display + Send + Sync + 'static {}
