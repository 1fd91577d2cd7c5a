//! Coupled-mode response of one or two superimposed Bragg stop bands.
//!
//! Each band couples the forward wave to a backward wave with strength
//! `kappa` around its center frequency. The forward dressing `G+(z)` and
//! backward envelope `G-(z)` are normalized to a unit outgoing wave at the
//! exit face (`G+(L) = e^{i delta L}`) with no incoming backward wave at the
//! entrance (`G-(0) = 0`), the boundary conditions of an output photon mode.
//!
//! Amplitudes are evaluated in the exponentially scaled form
//! `a e^{xi (z-L)} + b e^{-xi (z+L)}` so no hyperbolic of a large argument
//! is ever formed; a short polynomial series takes over near the band edge
//! where `xi -> 0` makes the two exponentials degenerate.

use num_complex::Complex;

use crate::dispersion::{FiberSpec, Polarization};
use crate::error::{Error, Result};
use crate::{vacuum_omega, Real};

/// Band-edge switch: below this value of |xi| L the two-exponential form
/// loses digits to cancellation and the series branch is used instead.
/// Truncation error of the series at the switch is ~(xi L)^4/24 ~ 4e-14.
pub(crate) const SERIES_THRESHOLD: f64 = 1e-3;

/// One or two superimposed stop bands written over the full fiber length.
///
/// Center wavelengths are held sorted ascending; invariants are enforced at
/// construction, so fields are exposed through getters.
#[derive(Clone, Debug, PartialEq)]
pub struct GratingSpec<T> {
    center_wavelengths: Vec<T>,
    index_contrast: T,
    coupling_scale: T,
    extent: T,
}

impl<T: Real> GratingSpec<T> {
    /// Builds a grating over `[0, extent]` with stop bands centered at the
    /// given vacuum wavelengths (meters).
    ///
    /// `index_contrast` is the index-modulation depth of one component
    /// grating; `coupling_scale` rescales the per-band coupling (a
    /// two-band superposition halves each band's strength).
    pub fn new(
        center_wavelengths: &[T],
        index_contrast: T,
        coupling_scale: T,
        extent: T,
    ) -> Result<Self> {
        if center_wavelengths.is_empty() || center_wavelengths.len() > 2 {
            return Err(Error::invalid(
                "grating stop-band centers",
                format!("need 1 or 2 entries, got {}", center_wavelengths.len()),
            ));
        }
        for &lam in center_wavelengths {
            if !(lam > T::zero() && lam.is_finite()) {
                return Err(Error::invalid(
                    "grating stop-band center",
                    format!("wavelengths must be positive and finite, got {lam}"),
                ));
            }
        }
        if !(index_contrast >= T::zero() && index_contrast.is_finite()) {
            return Err(Error::invalid(
                "grating index contrast",
                format!("must be nonnegative and finite, got {index_contrast}"),
            ));
        }
        if !(coupling_scale > T::zero() && coupling_scale <= T::one()) {
            return Err(Error::invalid(
                "grating coupling scale",
                format!("must lie in (0, 1], got {coupling_scale}"),
            ));
        }
        if !(extent > T::zero() && extent.is_finite()) {
            return Err(Error::invalid(
                "grating extent",
                format!("must be positive and finite, got {extent}"),
            ));
        }
        let mut centers = center_wavelengths.to_vec();
        centers.sort_by(|a, b| a.partial_cmp(b).expect("finite wavelengths"));
        Ok(GratingSpec {
            center_wavelengths: centers,
            index_contrast,
            coupling_scale,
            extent,
        })
    }

    pub fn bands(&self) -> usize {
        self.center_wavelengths.len()
    }

    /// Center vacuum wavelengths, meters, ascending.
    pub fn center_wavelengths(&self) -> &[T] {
        &self.center_wavelengths
    }

    pub fn center_wavelength(&self, band: usize) -> T {
        self.center_wavelengths[band]
    }

    pub fn center_omega(&self, band: usize) -> T {
        vacuum_omega(self.center_wavelengths[band])
    }

    pub fn index_contrast(&self) -> T {
        self.index_contrast
    }

    pub fn coupling_scale(&self) -> T {
        self.coupling_scale
    }

    /// Grating length along the fiber, meters.
    pub fn extent(&self) -> T {
        self.extent
    }

    /// Effective coupling strength of a band, rad/m:
    /// `kappa = scale * 4 dn / lambda_B`.
    pub fn coupling(&self, band: usize) -> T {
        self.coupling_scale * T::lit(4.0) * self.index_contrast / self.center_wavelengths[band]
    }

    /// Detuning from a band center, rad/m: `k(omega) - k(omega_B)` on the
    /// same polarization, so the band is centered for both axes.
    pub fn detuning(
        &self,
        fiber: &FiberSpec<T>,
        omega: T,
        pol: Polarization,
        band: usize,
    ) -> Result<T> {
        let k = fiber.wavevector(omega, pol)?;
        let k_center = fiber.wavevector(self.center_omega(band), pol)?;
        Ok(k - k_center)
    }

    /// Physical pitch of a band's index modulation, meters:
    /// `Lambda = lambda_B / (2 n)`.
    pub fn period(&self, fiber: &FiberSpec<T>, band: usize, pol: Polarization) -> Result<T> {
        let lam = self.center_wavelengths[band];
        Ok(lam / (T::lit(2.0) * fiber.refractive_index(lam, pol)?))
    }

    /// Full stop-band width as a vacuum-wavelength span, meters:
    /// `lambda_B^2 kappa / (pi n)`.
    pub fn stop_band_width(&self, fiber: &FiberSpec<T>, band: usize) -> Result<T> {
        let lam = self.center_wavelengths[band];
        let n = fiber.refractive_index(lam, Polarization::Y)?;
        Ok(lam * lam * self.coupling(band) / (T::PI() * n))
    }

    /// Pitch of the superposition's rapid carrier: the harmonic mean of the
    /// per-band pitches (the beat rides on the mean spatial frequency).
    pub fn carrier_period(&self, fiber: &FiberSpec<T>) -> Result<T> {
        let mut inv_sum = T::zero();
        for band in 0..self.bands() {
            inv_sum += self.period(fiber, band, Polarization::Y)?.recip();
        }
        Ok(T::lit(self.bands() as f64) / inv_sum)
    }

    /// Number of carrier periods over the full extent.
    pub fn fringe_count(&self, fiber: &FiberSpec<T>) -> Result<T> {
        Ok(self.extent / self.carrier_period(fiber)?)
    }

    /// Spatial period of the two-band beat envelope, or `None` for a single
    /// band.
    pub fn beat_period(&self, fiber: &FiberSpec<T>) -> Result<Option<T>> {
        if self.bands() < 2 {
            return Ok(None);
        }
        let p0 = self.period(fiber, 0, Polarization::Y)?;
        let p1 = self.period(fiber, 1, Polarization::Y)?;
        Ok(Some(T::lit(2.0) / (p0.recip() - p1.recip()).abs()))
    }

    /// Index of the band whose center frequency is nearest to `omega`; an
    /// exact tie picks the lower-frequency band.
    pub fn nearest_band(&self, omega: T) -> usize {
        let mut best = 0;
        let mut best_distance = T::infinity();
        // Ascending wavelength is descending frequency, so `<=` resolves
        // ties toward the lower frequency.
        for band in 0..self.bands() {
            let distance = (omega - self.center_omega(band)).abs();
            if distance <= best_distance {
                best = band;
                best_distance = distance;
            }
        }
        best
    }

    /// Coupled-mode envelopes of one band at frequency `omega` and position
    /// `z` along the grating.
    pub fn response(
        &self,
        fiber: &FiberSpec<T>,
        band: usize,
        omega: T,
        pol: Polarization,
        z: T,
    ) -> Result<GratingResponse<T>> {
        if band >= self.bands() {
            return Err(Error::invalid(
                "grating band index",
                format!("band {band} of a {}-band grating", self.bands()),
            ));
        }
        if !(z >= T::zero() && z <= self.extent) {
            return Err(Error::PositionOutOfExtent {
                z_m: z.as_f64(),
                length_m: self.extent.as_f64(),
            });
        }
        let delta = self.detuning(fiber, omega, pol, band)?;
        let kappa = self.coupling(band);
        let modes = ModeCoeffs::new(delta, kappa, self.extent);
        Ok(GratingResponse {
            forward: modes.g_plus(z),
            backward: modes.g_minus(z),
            detuning: delta,
            xi: modes.xi,
            kappa,
            band,
        })
    }

    /// Response of the band nearest to `omega`; the cross-band correction
    /// of the distant band is negligible at point-diagnostic level.
    pub fn moire_response(
        &self,
        fiber: &FiberSpec<T>,
        omega: T,
        pol: Polarization,
        z: T,
    ) -> Result<GratingResponse<T>> {
        self.response(fiber, self.nearest_band(omega), omega, pol, z)
    }
}

/// Stop-band envelopes and the local coupled-mode parameters at one
/// evaluation point.
#[derive(Clone, Copy, Debug)]
pub struct GratingResponse<T> {
    /// Forward dressing G+(z), unit magnitude `e^{i delta L}` at `z = L`.
    pub forward: Complex<T>,
    /// Backward envelope G-(z), zero at `z = 0`.
    pub backward: Complex<T>,
    /// Detuning from the band center, rad/m.
    pub detuning: T,
    /// `sqrt(kappa^2 - delta^2)` on the principal branch, rad/m.
    pub xi: Complex<T>,
    /// Effective coupling of the dispatched band, rad/m.
    pub kappa: T,
    /// Which band produced the response.
    pub band: usize,
}

/// Scaled coupled-mode coefficients of one band at one frequency.
///
/// `g_plus`/`g_minus` evaluate the envelopes; the fields are consumed
/// directly by the closed-form overlap integral, which expands the product
/// of dressings into exponential components.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ModeCoeffs<T> {
    pub delta: T,
    pub kappa: T,
    pub length: T,
    /// kappa^2 - delta^2, exactly real.
    pub xi_sq: T,
    /// Principal square root of `xi_sq`: nonnegative real inside the band,
    /// positive imaginary outside.
    pub xi: Complex<T>,
    /// (xi + i delta)/2, weight of the `e^{xi (z-L)}` component.
    pub a: Complex<T>,
    /// (xi - i delta)/2, weight of the `e^{-xi (z+L)}` component.
    pub b: Complex<T>,
    /// Scaled denominator `a + b e^{-2 xi L}`; every retained exponential
    /// has nonpositive real part.
    pub denom: Complex<T>,
    /// Use the polynomial branch (band edge, |xi| L below threshold).
    pub series: bool,
}

impl<T: Real> ModeCoeffs<T> {
    pub fn new(delta: T, kappa: T, length: T) -> Self {
        // Factored difference keeps the band edge well conditioned.
        let xi_sq = (kappa - delta) * (kappa + delta);
        let xi = if xi_sq >= T::zero() {
            Complex::new(xi_sq.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-xi_sq).sqrt())
        };
        let half = T::lit(0.5);
        let i_delta = Complex::new(T::zero(), delta);
        let a = (xi + i_delta) * half;
        let b = (xi - i_delta) * half;
        let denom = a + b * (-(xi + xi) * length).exp();
        let series = xi.norm() * length < T::lit(SERIES_THRESHOLD);
        ModeCoeffs {
            delta,
            kappa,
            length,
            xi_sq,
            xi,
            a,
            b,
            denom,
            series,
        }
    }

    /// `e^{i delta L}`, the exit-face phase shared by both envelopes.
    pub fn exit_phase(&self) -> Complex<T> {
        Complex::new(T::zero(), self.delta * self.length).exp()
    }

    /// Denominator of the series branch: cosh(xi L) + i delta L sinhc(xi L),
    /// expanded in the exactly-real xi^2.
    pub fn series_denom(&self) -> Complex<T> {
        let w2 = self.xi_sq * self.length * self.length;
        let cosh = T::one() + w2 * T::lit(0.5) + w2 * w2 * T::lit(1.0 / 24.0);
        let sinhc = T::one() + w2 * T::lit(1.0 / 6.0) + w2 * w2 * T::lit(1.0 / 120.0);
        Complex::new(cosh, self.delta * self.length * sinhc)
    }

    /// Forward dressing G+(z).
    pub fn g_plus(&self, z: T) -> Complex<T> {
        if self.series {
            // (1 + i delta z + xi^2 z^2/2 + i delta xi^2 z^3/6) e^{i d L} / d
            let z2 = z * z;
            let num = Complex::new(
                T::one() + self.xi_sq * z2 * T::lit(0.5),
                self.delta * z * (T::one() + self.xi_sq * z2 * T::lit(1.0 / 6.0)),
            );
            self.exit_phase() * num / self.series_denom()
        } else {
            let up = (self.xi * (z - self.length)).exp();
            let down = (-self.xi * (z + self.length)).exp();
            self.exit_phase() * (self.a * up + self.b * down) / self.denom
        }
    }

    /// Backward envelope G-(z).
    pub fn g_minus(&self, z: T) -> Complex<T> {
        let i = Complex::<T>::i();
        if self.series {
            // kappa z sinhc(xi z) e^{i d L} / (i d)
            let w2 = self.xi_sq * z * z;
            let sinhc = T::one() + w2 * T::lit(1.0 / 6.0) + w2 * w2 * T::lit(1.0 / 120.0);
            let num = Complex::new(self.kappa * z * sinhc, T::zero());
            self.exit_phase() * num / (i * self.series_denom())
        } else {
            let up = (self.xi * (z - self.length)).exp();
            let down = (-self.xi * (z + self.length)).exp();
            self.exit_phase() * (up - down) * self.kappa * T::lit(0.5) / (i * self.denom)
        }
    }
}
