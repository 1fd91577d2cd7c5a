use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the solver stack is generic over.
///
/// The bounds beyond [`Float`] are what the crate actually needs: literal
/// conversion (`FromPrimitive`), compound assignment in accumulation loops,
/// thread-safe sharing for parallel grid evaluation, and formatting for
/// error reports.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar.
    ///
    /// Infallible for the provided impls; a scalar that cannot represent
    /// ordinary constants cannot run the model at all.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("scalar must represent f64 literals")
    }

    /// Widens to `f64` for error reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
