//! Photon-pair generation by spontaneous four-wave mixing in a birefringent
//! fiber carrying a superimposed pair of Bragg stop bands.
//!
//! Two cross-polarized pumps placed symmetrically about a degenerate
//! frequency create frequency-degenerate photon pairs, while each pump alone
//! creates parasitic same-polarization pairs at detuned partner frequencies.
//! A moire grating opens narrow stop bands at those partner frequencies and
//! suppresses the parasitic processes without touching the degenerate pairs.
//!
//! The crate is organized bottom-up:
//!
//! - [`dispersion`]: Sellmeier index model, wavevectors, group velocities,
//!   and the pump-placement phase-matching solver.
//! - [`grating`]: coupled-mode stop-band response, numerically stable at
//!   large coupling-length products.
//! - [`spectrum`]: the longitudinal overlap integral behind the joint
//!   spectral amplitude, with closed-form and quadrature backends, grid
//!   evaluation, and the composite joint spectral intensity.
//! - [`metrics`]: singles/coincidence counting and coincidence-to-accidental
//!   ratios with and without the grating.
//!
//! All physics is generic over the floating-point scalar through [`Real`];
//! `*64` aliases below fix `f64` for ordinary use.

pub mod dispersion;
pub mod error;
pub mod grating;
pub mod metrics;
pub(crate) mod quad;
mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts a vacuum wavelength in meters to angular frequency in rad/s.
pub fn vacuum_omega<T: Real>(lambda: T) -> T {
    T::TAU() * T::lit(SPEED_OF_LIGHT) / lambda
}

/// Converts an angular frequency in rad/s to vacuum wavelength in meters.
pub fn vacuum_lambda<T: Real>(omega: T) -> T {
    T::TAU() * T::lit(SPEED_OF_LIGHT) / omega
}

pub type FiberSpec64 = dispersion::FiberSpec<f64>;
pub type PhaseMatchSolution64 = dispersion::PhaseMatchSolution<f64>;
pub type GratingSpec64 = grating::GratingSpec<f64>;
pub type GratingResponse64 = grating::GratingResponse<f64>;
pub type PumpConfig64 = spectrum::PumpConfig<f64>;
pub type PairSource64 = spectrum::PairSource<f64>;
pub type GridAxis64 = spectrum::GridAxis<f64>;
pub type JointAmplitudeGrid64 = spectrum::JointAmplitudeGrid<f64>;
pub type JsiGrid64 = spectrum::JsiGrid<f64>;
pub type ProcessGrids64 = spectrum::ProcessGrids<f64>;
pub type DetectionConfig64 = metrics::DetectionConfig<f64>;
pub type CountRates64 = metrics::CountRates<f64>;
pub type ParasiticRatios64 = metrics::ParasiticRatios<f64>;
pub type CarCurve64 = metrics::CarCurve<f64>;
