use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerics are generic over: f32 or f64.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    /// Lossy conversion from an f64 constant.
    fn from_double(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy conversion to f64 for reporting.
    fn to_double(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl<T> Scalar for T where T: RealField + FromPrimitive + ToPrimitive + Copy {}
