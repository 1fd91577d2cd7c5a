//! Material and birefringent dispersion of the fiber, and the phase-matching
//! solver that places the two pump wavelengths about a degenerate output.
//!
//! The bulk index follows the three-term Sellmeier fit to fused silica
//! (Malitson 1965); a constant index offset on the x axis models the weak
//! linear birefringence that phase-matches the cross-polarized process.

use crate::error::{Error, Result};
use crate::{vacuum_lambda, vacuum_omega, Real, SPEED_OF_LIGHT};

/// Bulk index model of the fiber core.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[non_exhaustive]
pub enum Material {
    /// Three-term Sellmeier fit to fused silica (Malitson 1965).
    FusedSilica,
}

/// Sellmeier numerators for fused silica.
const FUSED_SILICA_B: [f64; 3] = [0.696_166_3, 0.407_942_6, 0.897_479_4];
/// Sellmeier pole wavelengths for fused silica, micrometers.
const FUSED_SILICA_POLE_UM: [f64; 3] = [0.068_404_3, 0.116_241_4, 9.896_161];

impl Material {
    /// Bulk refractive index at vacuum wavelength `lambda` (meters).
    fn index<T: Real>(self, lambda: T) -> T {
        match self {
            Material::FusedSilica => {
                let um = lambda * T::lit(1e6);
                let u2 = um * um;
                let mut n2 = T::one();
                for (&b, &c) in FUSED_SILICA_B.iter().zip(&FUSED_SILICA_POLE_UM) {
                    let c2 = T::lit(c * c);
                    n2 += T::lit(b) * u2 / (u2 - c2);
                }
                n2.sqrt()
            }
        }
    }

    /// Analytic dn/dlambda in 1/m at vacuum wavelength `lambda` (meters).
    fn index_slope<T: Real>(self, lambda: T) -> T {
        match self {
            Material::FusedSilica => {
                let um = lambda * T::lit(1e6);
                let u2 = um * um;
                // d(n^2)/d(lambda_um); each pole contributes -2 B c^2 l / (l^2 - c^2)^2.
                let mut dn2 = T::zero();
                for (&b, &c) in FUSED_SILICA_B.iter().zip(&FUSED_SILICA_POLE_UM) {
                    let c2 = T::lit(c * c);
                    let den = u2 - c2;
                    dn2 -= T::lit(2.0 * b) * c2 * um / (den * den);
                }
                // dn/dl = d(n^2)/dl / (2n), converted from per-um to per-m.
                dn2 / (T::lit(2.0) * self.index(lambda)) * T::lit(1e6)
            }
        }
    }
}

/// Principal polarization axes of the fiber; `X` carries the birefringent
/// index offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    X,
    Y,
}

/// Immutable description of the fiber.
///
/// All operations are pure functions of these parameters and safe to share
/// across threads.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberSpec<T> {
    /// Physical length, meters.
    pub length: T,
    /// Bulk index model.
    pub material: Material,
    /// Index offset added on the x axis, dimensionless.
    pub birefringence: T,
    /// Validity window of the index fit, vacuum meters, low then high.
    pub window: (T, T),
}

impl<T: Real> FiberSpec<T> {
    /// Validity window of the bulk fit used by default, 1200 to 1700 nm.
    pub fn default_window() -> (T, T) {
        (T::lit(1.2e-6), T::lit(1.7e-6))
    }

    /// Builds a spec with the default validity window.
    pub fn new(length: T, birefringence: T) -> Result<Self> {
        Self::with_window(length, birefringence, Self::default_window())
    }

    pub fn with_window(length: T, birefringence: T, window: (T, T)) -> Result<Self> {
        if !(length > T::zero() && length.is_finite()) {
            return Err(Error::invalid(
                "fiber length",
                format!("must be positive and finite, got {length}"),
            ));
        }
        if !(birefringence >= T::zero() && birefringence.is_finite()) {
            return Err(Error::invalid(
                "fiber birefringence",
                format!("must be nonnegative and finite, got {birefringence}"),
            ));
        }
        if !(window.0 > T::zero() && window.0 < window.1 && window.1.is_finite()) {
            return Err(Error::invalid(
                "fiber wavelength window",
                format!("must satisfy 0 < low < high, got ({}, {})", window.0, window.1),
            ));
        }
        Ok(FiberSpec {
            length,
            material: Material::FusedSilica,
            birefringence,
            window,
        })
    }

    fn check_wavelength(&self, lambda: T) -> Result<()> {
        if lambda >= self.window.0 && lambda <= self.window.1 {
            Ok(())
        } else {
            Err(Error::WavelengthOutOfWindow {
                lambda_nm: (lambda * T::lit(1e9)).as_f64(),
                low_nm: (self.window.0 * T::lit(1e9)).as_f64(),
                high_nm: (self.window.1 * T::lit(1e9)).as_f64(),
            })
        }
    }

    fn check_omega(&self, omega: T) -> Result<T> {
        if !(omega > T::zero() && omega.is_finite()) {
            return Err(Error::invalid(
                "angular frequency",
                format!("must be positive and finite, got {omega}"),
            ));
        }
        let lambda = vacuum_lambda(omega);
        self.check_wavelength(lambda)?;
        Ok(lambda)
    }

    /// Refractive index at vacuum wavelength `lambda` (meters).
    pub fn refractive_index(&self, lambda: T, pol: Polarization) -> Result<T> {
        self.check_wavelength(lambda)?;
        let n = self.material.index(lambda);
        Ok(match pol {
            Polarization::X => n + self.birefringence,
            Polarization::Y => n,
        })
    }

    /// Wavevector k = n(omega) omega / c in rad/m.
    pub fn wavevector(&self, omega: T, pol: Polarization) -> Result<T> {
        let lambda = self.check_omega(omega)?;
        let n = self.refractive_index(lambda, pol)?;
        Ok(n * omega / T::lit(SPEED_OF_LIGHT))
    }

    /// Group index n - lambda dn/dlambda; the birefringent offset is
    /// wavelength-independent so it shifts the group index one-to-one.
    pub fn group_index(&self, lambda: T, pol: Polarization) -> Result<T> {
        let n = self.refractive_index(lambda, pol)?;
        Ok(n - lambda * self.material.index_slope(lambda))
    }

    /// Group velocity (dk/domega)^-1 in m/s, from the analytic index slope.
    pub fn group_velocity(&self, omega: T, pol: Polarization) -> Result<T> {
        let lambda = self.check_omega(omega)?;
        Ok(T::lit(SPEED_OF_LIGHT) / self.group_index(lambda, pol)?)
    }

    /// Mismatch of the dual-pump process: one photon taken from each pump,
    /// the pair created cross-polarized at (omega_1 on x, omega_2 on y).
    ///
    /// Differences are grouped per axis so identical arguments cancel
    /// exactly.
    pub fn phase_mismatch_dual(
        &self,
        omega_pump_x: T,
        omega_pump_y: T,
        omega_1: T,
        omega_2: T,
    ) -> Result<T> {
        use Polarization::{X, Y};
        Ok((self.wavevector(omega_pump_x, X)? - self.wavevector(omega_1, X)?)
            + (self.wavevector(omega_pump_y, Y)? - self.wavevector(omega_2, Y)?))
    }

    /// Mismatch of a single-pump process on one axis: two photons taken from
    /// the pump, the pair created co-polarized at (omega_1, omega_2).
    pub fn phase_mismatch_single(
        &self,
        omega_pump: T,
        omega_1: T,
        omega_2: T,
        pol: Polarization,
    ) -> Result<T> {
        let k_pump = self.wavevector(omega_pump, pol)?;
        Ok((k_pump - self.wavevector(omega_1, pol)?)
            + (k_pump - self.wavevector(omega_2, pol)?))
    }

    /// Finds the pump detuning about `lambda_degenerate` that phase-matches
    /// the dual-pump process to a degenerate pair.
    ///
    /// Pumps are constrained to `omega_d +/- detuning` so energy
    /// conservation is exact; the detuning is bracketed between 0.05 and
    /// 25 nm of wavelength offset and refined by bisection with secant
    /// acceleration. Both assignments of the x pump (blue or red side) are
    /// scanned; with a positive index offset on x and anomalous group
    /// dispersion only the blue-side assignment carries a root.
    pub fn solve_pump_placement(&self, lambda_degenerate: T) -> Result<PhaseMatchSolution<T>> {
        self.check_wavelength(lambda_degenerate)?;
        let omega_d = vacuum_omega(lambda_degenerate);

        // Mismatch at degenerate output as a function of pump detuning,
        // for a given side assignment of the x pump.
        let mismatch = |dw: T, x_blue: bool| -> Result<T> {
            let (omega_x, omega_y) = if x_blue {
                (omega_d + dw, omega_d - dw)
            } else {
                (omega_d - dw, omega_d + dw)
            };
            self.phase_mismatch_dual(omega_x, omega_y, omega_d, omega_d)
        };

        // Bracket endpoints as angular detunings for 0.05 and 25 nm offsets
        // on the blue side.
        let dw_of = |dl: T| vacuum_omega(lambda_degenerate - dl) - omega_d;
        let dw_min = dw_of(T::lit(0.05e-9));
        let dw_max = dw_of(T::lit(25e-9));

        for x_blue in [true, false] {
            // Geometric scan for a sign change; the mismatch is smooth and
            // has at most one nontrivial root here.
            let steps = 64;
            let ratio = (dw_max / dw_min).powf(T::one() / T::lit(steps as f64));
            let mut lo = dw_min;
            let mut f_lo = mismatch(lo, x_blue)?;
            let mut bracket = None;
            for i in 1..=steps {
                let hi = if i == steps { dw_max } else { lo * ratio };
                let f_hi = mismatch(hi, x_blue)?;
                if f_lo == T::zero() || f_lo.signum() != f_hi.signum() {
                    bracket = Some((lo, hi, f_lo, f_hi));
                    break;
                }
                lo = hi;
                f_lo = f_hi;
            }
            let Some((lo, hi, f_lo, f_hi)) = bracket else {
                continue;
            };
            let dw = refine_root(|x| mismatch(x, x_blue), lo, hi, f_lo, f_hi)?;
            let (omega_x, omega_y) = if x_blue {
                (omega_d + dw, omega_d - dw)
            } else {
                (omega_d - dw, omega_d + dw)
            };
            return Ok(PhaseMatchSolution {
                lambda_pump_x: vacuum_lambda(omega_x),
                lambda_pump_y: vacuum_lambda(omega_y),
                lambda_degenerate,
                pump_detuning: dw,
                residual_mismatch: self
                    .phase_mismatch_dual(omega_x, omega_y, omega_d, omega_d)?,
            });
        }

        Err(Error::NoPhaseMatch {
            lambda_nm: (lambda_degenerate * T::lit(1e9)).as_f64(),
            reason: "dual-pump mismatch has no sign change in the 0.05-25 nm \
                     detuning bracket for either pump-side assignment",
        })
    }
}

/// Pump placement solved about a degenerate wavelength.
///
/// Wavelengths are vacuum meters. Energy conservation
/// `omega_x + omega_y = 2 omega_d` holds to rounding by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatchSolution<T> {
    pub lambda_pump_x: T,
    pub lambda_pump_y: T,
    pub lambda_degenerate: T,
    /// Pump angular detuning from the degenerate frequency, rad/s.
    pub pump_detuning: T,
    /// Dual-pump mismatch left at the returned placement, rad/m.
    pub residual_mismatch: T,
}

impl<T: Real> PhaseMatchSolution<T> {
    pub fn omega_pump_x(&self) -> T {
        vacuum_omega(self.lambda_pump_x)
    }

    pub fn omega_pump_y(&self) -> T {
        vacuum_omega(self.lambda_pump_y)
    }

    pub fn omega_degenerate(&self) -> T {
        vacuum_omega(self.lambda_degenerate)
    }

    /// Wavelengths (x, y) of the parasitic single-pump partners: each pump
    /// `p` can pair a degenerate photon with one at `2 omega_p - omega_d`.
    pub fn parasitic_partners(&self) -> (T, T) {
        let omega_d = self.omega_degenerate();
        let two = T::lit(2.0);
        (
            vacuum_lambda(two * self.omega_pump_x() - omega_d),
            vacuum_lambda(two * self.omega_pump_y() - omega_d),
        )
    }
}

/// Refines a bracketed root: secant candidate when it falls strictly inside
/// the bracket, bisection otherwise. Returns the abscissa once the bracket
/// shrinks to a few ulps.
fn refine_root<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    mut lo: T,
    mut hi: T,
    mut f_lo: T,
    mut f_hi: T,
) -> Result<T> {
    debug_assert!(lo < hi);
    let mut best = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    for _ in 0..200 {
        let width_limit = T::epsilon() * (T::one() + hi.abs()) * T::lit(4.0);
        if hi - lo <= width_limit {
            break;
        }
        let mid = lo + (hi - lo) * T::lit(0.5);
        let secant = if f_hi != f_lo {
            hi - f_hi * (hi - lo) / (f_hi - f_lo)
        } else {
            mid
        };
        let x = if secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            mid
        };
        let fx = f(x)?;
        if fx == T::zero() {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        best = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    }
    Ok(best)
}
