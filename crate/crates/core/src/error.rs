use thiserror::Error;

/// Crate-wide error type.
///
/// Values are reported in `f64` regardless of the scalar the model runs in,
/// keeping the type scalar-independent.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vacuum wavelength fell outside the dispersion model's validity
    /// window.
    #[error(
        "wavelength {lambda_nm:.3} nm outside the index model's validity window \
         [{low_nm:.1}, {high_nm:.1}] nm"
    )]
    WavelengthOutOfWindow {
        lambda_nm: f64,
        low_nm: f64,
        high_nm: f64,
    },

    /// A longitudinal position fell outside the structure.
    #[error("position {z_m:.6} m outside the grating extent [0, {length_m:.6}] m")]
    PositionOutOfExtent { z_m: f64, length_m: f64 },

    /// The pump-placement solver found no sign change in its bracket.
    #[error(
        "no phase-matched pump detuning for degenerate wavelength {lambda_nm:.3} nm: {reason}"
    )]
    NoPhaseMatch {
        lambda_nm: f64,
        reason: &'static str,
    },

    /// A constructor or operation was handed a value that violates its
    /// contract. `what` names the offending field or argument.
    #[error("invalid {what}: {reason}")]
    InvalidInput { what: &'static str, reason: String },

    /// Two grids that must share axes do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            what,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
