//! Scalar abstraction: everything numeric in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable for probabilities and information measures.
///
/// Implemented for `f32` and `f64`; `f64` is the default type parameter of
/// every public struct and the precision used by the CLI and sweep harness.
pub trait Real:
    Float + FromPrimitive + AddAssign + SubAssign + MulAssign + DivAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for tolerances and literals.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 literal")
    }

    /// Conversion from a `usize` count (alphabet sizes, trial counts).
    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits in scalar")
    }

    /// Lossy view as `f64`, for reporting and seed derivation.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
