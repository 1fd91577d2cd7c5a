//! Joint spectral amplitudes of the three coherent pair processes.
//!
//! A pair source supports three four-wave-mixing channels: the desired
//! dual-pump process producing a cross-polarized pair, and two parasitic
//! single-pump processes producing co-polarized pairs. Each channel's
//! amplitude factors into a pump envelope and a phase-matching overlap
//! along the fiber; the stop bands reshape the overlap by dressing the
//! photon modes with their backward-coupled envelopes.
//!
//! The overlap integral has a closed form: every dressed photon mode is a
//! short sum of `z^m e^{u z}` components, so the integrand expands into
//! moments that integrate analytically. A composite Gauss-Legendre backend
//! evaluates the same integrand numerically and serves as the oracle.

use num_complex::Complex;
use rayon::prelude::*;

use crate::dispersion::{FiberSpec, PhaseMatchSolution, Polarization};
use crate::error::{Error, Result};
use crate::grating::{GratingSpec, ModeCoeffs};
use crate::{quad, vacuum_omega, Real};

/// The three coherent processes, tagged by the pair's polarizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProcessLabel {
    /// Both photons x-polarized, driven by the x pump alone.
    Xx,
    /// Both photons y-polarized, driven by the y pump alone.
    Yy,
    /// Cross-polarized pair, one photon from each pump.
    Xy,
}

impl ProcessLabel {
    pub const ALL: [ProcessLabel; 3] = [ProcessLabel::Xx, ProcessLabel::Yy, ProcessLabel::Xy];

    /// Polarizations carried by (photon 1, photon 2).
    pub fn photon_polarizations(self) -> (Polarization, Polarization) {
        match self {
            ProcessLabel::Xx => (Polarization::X, Polarization::X),
            ProcessLabel::Yy => (Polarization::Y, Polarization::Y),
            ProcessLabel::Xy => (Polarization::X, Polarization::Y),
        }
    }

    pub fn is_cross(self) -> bool {
        self == ProcessLabel::Xy
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessLabel::Xx => "xx",
            ProcessLabel::Yy => "yy",
            ProcessLabel::Xy => "xy",
        }
    }
}

/// Which evaluation path computes the phase-matching overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Analytic moment integrals of the expanded integrand.
    ClosedForm,
    /// Composite Gauss-Legendre quadrature of the same integrand.
    Quadrature,
}

/// Transform-limited Gaussian pump envelope at `detuning` from the pump
/// center, for a pulse of intensity FWHM `duration`: unity at zero detuning,
/// real and positive everywhere.
pub fn pump_amplitude<T: Real>(detuning: T, duration: T) -> T {
    debug_assert!(duration > T::zero());
    let arg = detuning * duration;
    (-(arg * arg) / (T::lit(8.0) * T::LN_2())).exp()
}

/// Centers and pulse duration of the two pump trains, equal amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PumpConfig<T> {
    lambda_x: T,
    lambda_y: T,
    duration: T,
}

impl<T: Real> PumpConfig<T> {
    /// `lambda_x`, `lambda_y` are vacuum meters and must differ; `duration`
    /// is the pulse intensity FWHM in seconds.
    pub fn new(lambda_x: T, lambda_y: T, duration: T) -> Result<Self> {
        for (name, lam) in [("x pump wavelength", lambda_x), ("y pump wavelength", lambda_y)] {
            if !(lam > T::zero() && lam.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {lam}")));
            }
        }
        if lambda_x == lambda_y {
            return Err(Error::invalid(
                "pump wavelengths",
                "the two pumps must sit at distinct centers".to_string(),
            ));
        }
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::invalid(
                "pump duration",
                format!("must be positive and finite, got {duration}"),
            ));
        }
        Ok(PumpConfig { lambda_x, lambda_y, duration })
    }

    /// Pumps at a phase-matched placement.
    pub fn from_solution(solution: &PhaseMatchSolution<T>, duration: T) -> Result<Self> {
        Self::new(solution.lambda_pump_x, solution.lambda_pump_y, duration)
    }

    pub fn lambda_x(&self) -> T {
        self.lambda_x
    }

    pub fn lambda_y(&self) -> T {
        self.lambda_y
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn omega_x(&self) -> T {
        vacuum_omega(self.lambda_x)
    }

    pub fn omega_y(&self) -> T {
        vacuum_omega(self.lambda_y)
    }

    /// Midpoint frequency shared by both pumps' energy bands.
    pub fn omega_degenerate(&self) -> T {
        (self.omega_x() + self.omega_y()) * T::lit(0.5)
    }

    /// Pump center frequencies feeding a process, as (pump a, pump b).
    pub fn pump_omegas(&self, process: ProcessLabel) -> (T, T) {
        match process {
            ProcessLabel::Xx => (self.omega_x(), self.omega_x()),
            ProcessLabel::Yy => (self.omega_y(), self.omega_y()),
            ProcessLabel::Xy => (self.omega_x(), self.omega_y()),
        }
    }
}

/// Uniform, strictly increasing grid of angular frequencies (rad/s).
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis<T> {
    values: Vec<T>,
    step: T,
}

impl<T: Real> GridAxis<T> {
    pub const MIN_POINTS: usize = 64;

    /// Uniform-in-frequency axis spanning a vacuum wavelength window
    /// (meters, low then high).
    pub fn from_wavelength_window(lambda_low: T, lambda_high: T, points: usize) -> Result<Self> {
        if !(lambda_low > T::zero() && lambda_low < lambda_high && lambda_high.is_finite()) {
            return Err(Error::invalid(
                "axis wavelength window",
                format!("must satisfy 0 < low < high, got ({lambda_low}, {lambda_high})"),
            ));
        }
        Self::from_omega_range(vacuum_omega(lambda_high), vacuum_omega(lambda_low), points)
    }

    pub fn from_omega_range(omega_low: T, omega_high: T, points: usize) -> Result<Self> {
        if points < Self::MIN_POINTS {
            return Err(Error::invalid(
                "axis points",
                format!("need at least {}, got {points}", Self::MIN_POINTS),
            ));
        }
        if !(omega_low > T::zero() && omega_low < omega_high && omega_high.is_finite()) {
            return Err(Error::invalid(
                "axis frequency range",
                format!("must satisfy 0 < low < high, got ({omega_low}, {omega_high})"),
            ));
        }
        let step = (omega_high - omega_low) / T::lit((points - 1) as f64);
        let values = (0..points)
            .map(|i| omega_low + step * T::lit(i as f64))
            .collect();
        Ok(GridAxis { values, step })
    }

    /// The reporting default: 1535 to 1565 nm, 1001 points.
    pub fn standard() -> Self {
        Self::from_wavelength_window(T::lit(1.535e-6), T::lit(1.565e-6), 1001)
            .expect("standard axis parameters are valid")
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn at(&self, index: usize) -> T {
        self.values[index]
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("axis is never empty")
    }

    /// Index of the grid point closest to `omega`, clamped to the axis.
    pub fn nearest_index(&self, omega: T) -> usize {
        let pos = ((omega - self.min()) / self.step).round().as_f64();
        (pos.max(0.0) as usize).min(self.len() - 1)
    }
}

/// Complex pair amplitude sampled on a frequency grid.
#[derive(Clone, Debug)]
pub struct JointAmplitudeGrid<T> {
    axis1: GridAxis<T>,
    axis2: GridAxis<T>,
    /// Row-major: `values[i1 * axis2.len() + i2]`.
    values: Vec<Complex<T>>,
    process: ProcessLabel,
    normalized: bool,
    truncated: bool,
    normalization: T,
}

impl<T: Real> JointAmplitudeGrid<T> {
    pub(crate) fn from_parts(
        axis1: GridAxis<T>,
        axis2: GridAxis<T>,
        values: Vec<Complex<T>>,
        process: ProcessLabel,
    ) -> Self {
        debug_assert_eq!(values.len(), axis1.len() * axis2.len());
        JointAmplitudeGrid {
            axis1,
            axis2,
            values,
            process,
            normalized: false,
            truncated: false,
            normalization: T::one(),
        }
    }

    pub fn axis1(&self) -> &GridAxis<T> {
        &self.axis1
    }

    pub fn axis2(&self) -> &GridAxis<T> {
        &self.axis2
    }

    pub fn process(&self) -> ProcessLabel {
        self.process
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn value(&self, i1: usize, i2: usize) -> Complex<T> {
        self.values[i1 * self.axis2.len() + i2]
    }

    pub fn intensity(&self, i1: usize, i2: usize) -> T {
        self.value(i1, i2).norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Set when the boundary-mass check found more than the allowed share
    /// of the norm in the outermost cells: the window clips the amplitude.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Accumulated norm factored out of the values: a raw amplitude equals
    /// the stored value times sqrt of this.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    /// Riemann-sum squared norm, summed serially in index order so the
    /// result never depends on evaluation schedule.
    pub fn norm_mass(&self) -> T {
        let cell = self.axis1.step() * self.axis2.step();
        let mut total = T::zero();
        for v in &self.values {
            total += v.norm_sqr();
        }
        total * cell
    }

    /// Share of the squared norm sitting in the outermost row/column ring.
    pub fn boundary_fraction(&self) -> T {
        let (n1, n2) = (self.axis1.len(), self.axis2.len());
        let mut edge = T::zero();
        let mut total = T::zero();
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let w = self.value(i1, i2).norm_sqr();
                total += w;
                if i1 == 0 || i1 == n1 - 1 || i2 == 0 || i2 == n2 - 1 {
                    edge += w;
                }
            }
        }
        if total > T::zero() {
            edge / total
        } else {
            T::zero()
        }
    }

    /// Rescales so the squared norm is one; returns the mass folded out.
    /// Renormalizing an already normalized grid is a no-op up to rounding.
    pub fn normalize(&mut self) -> Result<T> {
        let mass = self.norm_mass();
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(Error::invalid(
                "amplitude grid norm",
                format!("squared norm must be positive and finite, got {mass}"),
            ));
        }
        let scale = mass.sqrt().recip();
        for v in &mut self.values {
            *v *= scale;
        }
        self.normalization *= mass;
        self.normalized = true;
        Ok(mass)
    }
}

/// Real nonnegative joint spectral intensity on a frequency grid.
#[derive(Clone, Debug)]
pub struct JsiGrid<T> {
    axis1: GridAxis<T>,
    axis2: GridAxis<T>,
    values: Vec<T>,
}

impl<T: Real> JsiGrid<T> {
    pub fn axis1(&self) -> &GridAxis<T> {
        &self.axis1
    }

    pub fn axis2(&self) -> &GridAxis<T> {
        &self.axis2
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i1: usize, i2: usize) -> T {
        self.values[i1 * self.axis2.len() + i2]
    }

    pub fn norm_mass(&self) -> T {
        let cell = self.axis1.step() * self.axis2.step();
        let mut total = T::zero();
        for &v in &self.values {
            total += v;
        }
        total * cell
    }

    pub fn peak(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc.max(v))
    }
}

/// Weights of the incoherent process mixture in the measured intensity:
/// 9/26 each for the co-polarized channels, 8/26 for the cross channel.
const JSI_WEIGHT_SAME: f64 = 9.0 / 26.0;
const JSI_WEIGHT_CROSS: f64 = 8.0 / 26.0;

/// Combines the three normalized amplitudes into the joint spectral
/// intensity. All grids must share axes and be normalized.
pub fn jsi<T: Real>(
    xx: &JointAmplitudeGrid<T>,
    yy: &JointAmplitudeGrid<T>,
    xy: &JointAmplitudeGrid<T>,
) -> Result<JsiGrid<T>> {
    let grids = [xx, yy, xy];
    for (grid, want) in grids.iter().zip([ProcessLabel::Xx, ProcessLabel::Yy, ProcessLabel::Xy]) {
        if grid.process() != want {
            return Err(Error::invalid(
                "intensity composition",
                format!("expected a {} grid, got {}", want.name(), grid.process().name()),
            ));
        }
        if !grid.is_normalized() {
            return Err(Error::invalid(
                "intensity composition",
                format!("{} grid is not normalized", grid.process().name()),
            ));
        }
    }
    for other in [yy, xy] {
        if other.axis1() != xx.axis1() || other.axis2() != xx.axis2() {
            return Err(Error::GridMismatch(format!(
                "{} and {} grids are sampled on different axes",
                xx.process().name(),
                other.process().name()
            )));
        }
    }
    let w_same = T::lit(JSI_WEIGHT_SAME);
    let w_cross = T::lit(JSI_WEIGHT_CROSS);
    let values = (0..xx.values().len())
        .map(|i| {
            (xx.values()[i].norm_sqr() + yy.values()[i].norm_sqr()) * w_same
                + xy.values()[i].norm_sqr() * w_cross
        })
        .collect();
    Ok(JsiGrid {
        axis1: xx.axis1().clone(),
        axis2: xx.axis2().clone(),
        values,
    })
}

/// Expected pairs per pulse of the full three-process mixture, in terms of
/// the cross-process interaction strength: the co-polarized channels add
/// 9/8 of the cross strength each, giving 13/4 in total.
pub fn pair_rate<T: Real>(zeta_xy_sq: T) -> T {
    debug_assert!(zeta_xy_sq >= T::zero());
    T::lit(13.0 / 4.0) * zeta_xy_sq
}

/// The three per-process amplitude grids of one source on shared axes.
#[derive(Clone, Debug)]
pub struct ProcessGrids<T> {
    pub xx: JointAmplitudeGrid<T>,
    pub yy: JointAmplitudeGrid<T>,
    pub xy: JointAmplitudeGrid<T>,
}

impl<T: Real> ProcessGrids<T> {
    pub fn get(&self, process: ProcessLabel) -> &JointAmplitudeGrid<T> {
        match process {
            ProcessLabel::Xx => &self.xx,
            ProcessLabel::Yy => &self.yy,
            ProcessLabel::Xy => &self.xy,
        }
    }

    pub fn jsi(&self) -> Result<JsiGrid<T>> {
        jsi(&self.xx, &self.yy, &self.xy)
    }
}

/// A fiber, its optional stop-band grating, and the pump placement:
/// everything needed to evaluate pair amplitudes.
#[derive(Clone, Debug)]
pub struct PairSource<T> {
    fiber: FiberSpec<T>,
    grating: Option<GratingSpec<T>>,
    pump: PumpConfig<T>,
}

impl<T: Real> PairSource<T> {
    /// A grating, when present, must span exactly the fiber length, and
    /// both pumps must lie inside the dispersion window.
    pub fn new(
        fiber: FiberSpec<T>,
        grating: Option<GratingSpec<T>>,
        pump: PumpConfig<T>,
    ) -> Result<Self> {
        if let Some(g) = &grating {
            if g.extent() != fiber.length {
                return Err(Error::invalid(
                    "grating extent",
                    format!(
                        "must equal the fiber length ({} m), got {} m",
                        fiber.length,
                        g.extent()
                    ),
                ));
            }
        }
        fiber.refractive_index(pump.lambda_x(), Polarization::X)?;
        fiber.refractive_index(pump.lambda_y(), Polarization::Y)?;
        Ok(PairSource { fiber, grating, pump })
    }

    pub fn fiber(&self) -> &FiberSpec<T> {
        &self.fiber
    }

    pub fn grating(&self) -> Option<&GratingSpec<T>> {
        self.grating.as_ref()
    }

    pub fn pump(&self) -> &PumpConfig<T> {
        &self.pump
    }

    /// The same source with the grating removed (uniform fiber reference).
    pub fn without_grating(&self) -> PairSource<T> {
        PairSource {
            fiber: self.fiber,
            grating: None,
            pump: self.pump,
        }
    }

    /// Plane-wave phase mismatch of a process at a photon frequency pair.
    pub fn uniform_mismatch(&self, process: ProcessLabel, omega_1: T, omega_2: T) -> Result<T> {
        let (pump_a, pump_b) = self.pump.pump_omegas(process);
        match process {
            ProcessLabel::Xy => self.fiber.phase_mismatch_dual(pump_a, pump_b, omega_1, omega_2),
            ProcessLabel::Xx => {
                self.fiber.phase_mismatch_single(pump_a, omega_1, omega_2, Polarization::X)
            }
            ProcessLabel::Yy => {
                self.fiber.phase_mismatch_single(pump_a, omega_1, omega_2, Polarization::Y)
            }
        }
    }

    /// Conjugated slowly-varying dressing of one photon mode: the product
    /// of every band's forward envelope relative to the plane wave.
    fn photon_factor(&self, omega: T, pol: Polarization) -> Result<PhotonFactor<T>> {
        let mut factor = PhotonFactor::unity();
        if let Some(g) = &self.grating {
            for band in 0..g.bands() {
                let delta = g.detuning(&self.fiber, omega, pol, band)?;
                let modes = ModeCoeffs::new(delta, g.coupling(band), g.extent());
                factor = factor.product(&PhotonFactor::from_modes(&modes));
            }
        }
        Ok(factor)
    }

    /// The band structures seen by one photon, for the quadrature backend.
    fn photon_modes(&self, omega: T, pol: Polarization) -> Result<Vec<ModeCoeffs<T>>> {
        let mut modes = Vec::new();
        if let Some(g) = &self.grating {
            for band in 0..g.bands() {
                let delta = g.detuning(&self.fiber, omega, pol, band)?;
                modes.push(ModeCoeffs::new(delta, g.coupling(band), g.extent()));
            }
        }
        Ok(modes)
    }

    /// Phase-matching overlap of a process at one frequency pair
    /// (unnormalized, units of length).
    pub fn phase_match_integral(
        &self,
        process: ProcessLabel,
        omega_1: T,
        omega_2: T,
        backend: Backend,
    ) -> Result<Complex<T>> {
        match backend {
            Backend::ClosedForm => self.overlap_closed(process, omega_1, omega_2),
            Backend::Quadrature => self.overlap_quadrature(process, omega_1, omega_2),
        }
    }

    fn overlap_closed(&self, process: ProcessLabel, omega_1: T, omega_2: T) -> Result<Complex<T>> {
        let mismatch = self.uniform_mismatch(process, omega_1, omega_2)?;
        let (pol_1, pol_2) = process.photon_polarizations();
        let f1 = self.photon_factor(omega_1, pol_1)?;
        let f2 = self.photon_factor(omega_2, pol_2)?;
        let length = self.fiber.length;
        let base = Complex::new(T::zero(), mismatch);
        let shift = f1.shift + f2.shift;
        let mut total = Complex::new(T::zero(), T::zero());
        for t1 in &f1.terms {
            for t2 in &f2.terms {
                let p = base + t1.exponent + t2.exponent;
                let moment = overlap_moment(p, shift, length, t1.power + t2.power);
                total += t1.coef * t2.coef * moment;
            }
        }
        Ok(f1.prefactor * f2.prefactor * total)
    }

    fn overlap_quadrature(
        &self,
        process: ProcessLabel,
        omega_1: T,
        omega_2: T,
    ) -> Result<Complex<T>> {
        let mismatch = self.uniform_mismatch(process, omega_1, omega_2)?;
        let (pol_1, pol_2) = process.photon_polarizations();
        let modes_1 = self.photon_modes(omega_1, pol_1)?;
        let modes_2 = self.photon_modes(omega_2, pol_2)?;
        let length = self.fiber.length;

        // Panel count tracks the integrand's total oscillation rate.
        let mut rate = mismatch.abs();
        for m in modes_1.iter().chain(&modes_2) {
            rate += T::lit(2.0) * m.delta.abs() + m.kappa;
        }
        let panels = (rate * length / T::PI()).as_f64().ceil().max(32.0) as usize;

        let value = quad::integrate(T::zero(), length, panels, |z| {
            let mut v = (Complex::new(T::zero(), mismatch * z)).exp();
            for m in modes_1.iter().chain(&modes_2) {
                let envelope = m.g_plus(z) * Complex::new(T::zero(), -m.delta * z).exp();
                v *= envelope.conj();
            }
            v
        });
        Ok(value)
    }

    /// Unnormalized pair amplitude: pump envelope times overlap.
    pub fn jsa_point(
        &self,
        process: ProcessLabel,
        omega_1: T,
        omega_2: T,
        backend: Backend,
    ) -> Result<Complex<T>> {
        let (pump_a, pump_b) = self.pump.pump_omegas(process);
        // Grouped so the band center detunes to exactly zero on-axis.
        let detuning = (omega_1 - pump_a) + (omega_2 - pump_b);
        let envelope = pump_amplitude(detuning, self.pump.duration());
        Ok(self.phase_match_integral(process, omega_1, omega_2, backend)? * envelope)
    }

    /// Normalized amplitude grid of one process over `axis` on both sides,
    /// evaluated in parallel over rows. Results are bit-identical to the
    /// serial path: cells are independent and the norm is a serial sum.
    pub fn jsa_grid(
        &self,
        process: ProcessLabel,
        axis: &GridAxis<T>,
        backend: Backend,
    ) -> Result<JointAmplitudeGrid<T>> {
        let rows: Vec<Vec<Complex<T>>> = (0..axis.len())
            .into_par_iter()
            .map(|i1| self.jsa_row(process, axis, backend, i1))
            .collect::<Result<_>>()?;
        self.assemble_grid(process, axis, rows)
    }

    /// Serial twin of [`jsa_grid`](Self::jsa_grid).
    pub fn jsa_grid_serial(
        &self,
        process: ProcessLabel,
        axis: &GridAxis<T>,
        backend: Backend,
    ) -> Result<JointAmplitudeGrid<T>> {
        let rows: Vec<Vec<Complex<T>>> = (0..axis.len())
            .map(|i1| self.jsa_row(process, axis, backend, i1))
            .collect::<Result<_>>()?;
        self.assemble_grid(process, axis, rows)
    }

    fn jsa_row(
        &self,
        process: ProcessLabel,
        axis: &GridAxis<T>,
        backend: Backend,
        i1: usize,
    ) -> Result<Vec<Complex<T>>> {
        let omega_1 = axis.at(i1);
        axis.values()
            .iter()
            .map(|&omega_2| self.jsa_point(process, omega_1, omega_2, backend))
            .collect()
    }

    fn assemble_grid(
        &self,
        process: ProcessLabel,
        axis: &GridAxis<T>,
        rows: Vec<Vec<Complex<T>>>,
    ) -> Result<JointAmplitudeGrid<T>> {
        let mut values = Vec::with_capacity(axis.len() * axis.len());
        for row in rows {
            values.extend(row);
        }
        let mut grid = JointAmplitudeGrid::from_parts(axis.clone(), axis.clone(), values, process);
        grid.truncated = grid.boundary_fraction() > T::lit(1e-3);
        grid.normalize()?;
        Ok(grid)
    }

    /// All three process grids on a shared axis.
    pub fn process_grids(&self, axis: &GridAxis<T>, backend: Backend) -> Result<ProcessGrids<T>> {
        Ok(ProcessGrids {
            xx: self.jsa_grid(ProcessLabel::Xx, axis, backend)?,
            yy: self.jsa_grid(ProcessLabel::Yy, axis, backend)?,
            xy: self.jsa_grid(ProcessLabel::Xy, axis, backend)?,
        })
    }
}

/// One photon's conjugated dressing expanded into moment components:
/// `prefactor * e^{-shift} * sum(coef * z^power * e^{exponent z})`.
#[derive(Clone, Copy, Debug)]
struct EnvelopeTerm<T> {
    coef: Complex<T>,
    exponent: Complex<T>,
    power: u32,
}

#[derive(Clone, Debug)]
struct PhotonFactor<T> {
    prefactor: Complex<T>,
    /// Decay exponents factored out of the terms (sum of conj(xi) L per
    /// band) so every term's exponential stays bounded on [0, L].
    shift: Complex<T>,
    terms: Vec<EnvelopeTerm<T>>,
}

impl<T: Real> PhotonFactor<T> {
    /// The undressed photon: plane wave, factor one.
    fn unity() -> Self {
        PhotonFactor {
            prefactor: Complex::new(T::one(), T::zero()),
            shift: Complex::new(T::zero(), T::zero()),
            terms: vec![EnvelopeTerm {
                coef: Complex::new(T::one(), T::zero()),
                exponent: Complex::new(T::zero(), T::zero()),
                power: 0,
            }],
        }
    }

    /// Conjugate of `G+(z) e^{-i delta z}` for one band.
    fn from_modes(modes: &ModeCoeffs<T>) -> Self {
        let i_delta = Complex::new(T::zero(), modes.delta);
        let phase = modes.exit_phase().conj();
        if modes.series {
            // conj(1 + i d z + xi^2 z^2/2 + i d xi^2 z^3/6) e^{i d z} / conj(d)
            let xi_sq = modes.xi_sq;
            let coefs = [
                Complex::new(T::one(), T::zero()),
                -i_delta,
                Complex::new(xi_sq * T::lit(0.5), T::zero()),
                -i_delta * xi_sq * T::lit(1.0 / 6.0),
            ];
            PhotonFactor {
                prefactor: phase / modes.series_denom().conj(),
                shift: Complex::new(T::zero(), T::zero()),
                terms: coefs
                    .into_iter()
                    .enumerate()
                    .map(|(m, coef)| EnvelopeTerm { coef, exponent: i_delta, power: m as u32 })
                    .collect(),
            }
        } else {
            let xi_conj = modes.xi.conj();
            PhotonFactor {
                prefactor: phase / modes.denom.conj(),
                shift: xi_conj * modes.length,
                terms: vec![
                    EnvelopeTerm {
                        coef: modes.a.conj(),
                        exponent: xi_conj + i_delta,
                        power: 0,
                    },
                    EnvelopeTerm {
                        coef: modes.b.conj(),
                        exponent: -xi_conj + i_delta,
                        power: 0,
                    },
                ],
            }
        }
    }

    /// Product of two dressings acting on the same photon.
    fn product(&self, other: &PhotonFactor<T>) -> PhotonFactor<T> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(EnvelopeTerm {
                    coef: a.coef * b.coef,
                    exponent: a.exponent + b.exponent,
                    power: a.power + b.power,
                });
            }
        }
        PhotonFactor {
            prefactor: self.prefactor * other.prefactor,
            shift: self.shift + other.shift,
            terms,
        }
    }
}

/// `e^{-shift} * integral of z^power e^{p z} over [0, length]`.
///
/// The shift always has nonnegative real part at least as large as any
/// positive real part of `p * length` produced by the expansion, so the
/// combined exponentials never overflow.
fn overlap_moment<T: Real>(
    p: Complex<T>,
    shift: Complex<T>,
    length: T,
    power: u32,
) -> Complex<T> {
    if power == 0 {
        return plain_segment(p, shift, length);
    }
    let w = p * length;
    if w.norm() <= T::lit(2.0) {
        // L^(m+1) e^{-shift} sum_j w^j / (j! (m + j + 1))
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term / T::lit((power + 1) as f64);
        for j in 1..64 {
            term = term * w / T::lit(j as f64);
            let add = term / T::lit((power + 1 + j) as f64);
            sum += add;
            if add.norm() <= sum.norm() * T::epsilon() {
                break;
            }
        }
        (-shift).exp() * sum * length.powi(power as i32 + 1)
    } else {
        // Upward recurrence from the plain segment.
        let top = (w - shift).exp();
        let mut s = plain_segment(p, shift, length);
        for m in 1..=power {
            s = (top * length.powi(m as i32) - s * T::lit(m as f64)) / p;
        }
        s
    }
}

/// `e^{-shift} (e^{pL} - 1)/p` with the small-`pL` and large-`Re pL`
/// regimes handled explicitly.
fn plain_segment<T: Real>(p: Complex<T>, shift: Complex<T>, length: T) -> Complex<T> {
    let w = p * length;
    let norm = w.norm();
    if norm < T::lit(1e-8) {
        let correction = Complex::new(T::one(), T::zero())
            + w * T::lit(0.5)
            + w * w * T::lit(1.0 / 6.0);
        (-shift).exp() * correction * length
    } else if w.re <= T::lit(300.0) {
        (-shift).exp() * expm1_complex(w) / p
    } else {
        ((w - shift).exp() - (-shift).exp()) / p
    }
}

/// `e^w - 1` without cancellation for small `|w|`.
fn expm1_complex<T: Real>(w: Complex<T>) -> Complex<T> {
    let half_sin = (w.im * T::lit(0.5)).sin();
    Complex::new(
        w.re.exp_m1() * w.im.cos() - T::lit(2.0) * half_sin * half_sin,
        w.re.exp() * w.im.sin(),
    )
}
