//! Detection model: singles and coincidence rates behind narrow filters,
//! and the coincidence-to-accidental ratio (CAR) they imply.
//!
//! Both detectors sit behind top-hat filters of width `delta` centered on
//! the degenerate frequency. In the narrow-filter limit the counts reduce
//! to point evaluations of the normalized amplitudes: coincidences probe
//! only the cross process at the filter center, while each singles channel
//! also collects the co-polarized parasitic pairs, weighted by 9/4 from
//! the process-strength relation. The CAR then depends on the source only
//! through the parasitic-to-cross intensity ratios at the designed points.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quad;
use crate::spectrum::{Backend, PairSource, ProcessGrids, ProcessLabel};
use crate::{vacuum_lambda, Real, SPEED_OF_LIGHT};

/// Detector efficiencies, dark counts, and the shared collection filter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionConfig<T> {
    /// Detection efficiency of each polarization channel, in [0, 1].
    pub efficiency_x: T,
    pub efficiency_y: T,
    /// Dark counts per pulse added to each singles channel.
    pub dark_x: T,
    pub dark_y: T,
    /// Center of both top-hat filters, rad/s.
    pub filter_center: T,
    /// Full width of both top-hat filters, rad/s.
    pub filter_width: T,
}

impl<T: Real> DetectionConfig<T> {
    pub fn new(
        efficiency_x: T,
        efficiency_y: T,
        dark_x: T,
        dark_y: T,
        filter_center: T,
        filter_width: T,
    ) -> Result<Self> {
        for (name, eta) in [("x efficiency", efficiency_x), ("y efficiency", efficiency_y)] {
            if !(eta >= T::zero() && eta <= T::one()) {
                return Err(Error::invalid(name, format!("must lie in [0, 1], got {eta}")));
            }
        }
        for (name, dark) in [("x dark counts", dark_x), ("y dark counts", dark_y)] {
            if !(dark >= T::zero() && dark.is_finite()) {
                return Err(Error::invalid(
                    name,
                    format!("must be nonnegative and finite, got {dark}"),
                ));
            }
        }
        if !(filter_center > T::zero() && filter_center.is_finite()) {
            return Err(Error::invalid(
                "filter center",
                format!("must be positive and finite, got {filter_center}"),
            ));
        }
        if !(filter_width > T::zero() && filter_width.is_finite()) {
            return Err(Error::invalid(
                "filter width",
                format!("must be positive and finite, got {filter_width}"),
            ));
        }
        Ok(DetectionConfig {
            efficiency_x,
            efficiency_y,
            dark_x,
            dark_y,
            filter_center,
            filter_width,
        })
    }

    /// Noise-free detection at unit efficiency, filtered at the source's
    /// degenerate frequency with the default quarter-stop-band width.
    pub fn ideal_for(source: &PairSource<T>) -> Result<Self> {
        let width = default_filter_width(source)?;
        Self::new(
            T::one(),
            T::one(),
            T::zero(),
            T::zero(),
            source.pump().omega_degenerate(),
            width,
        )
    }

    /// Parasitic photons must stay suppressed across the whole collection
    /// band, so with a grating present the filter may not outgrow the
    /// stop band.
    pub fn validate_for(&self, source: &PairSource<T>) -> Result<()> {
        if source.grating().is_some() {
            let bound = collection_bandwidth_bound(source)?;
            if self.filter_width > bound {
                return Err(Error::invalid(
                    "filter width",
                    format!(
                        "must not exceed the stop-band collection bound {bound} rad/s \
                         when the grating is active, got {}",
                        self.filter_width
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Largest collection bandwidth over which the stop bands can suppress
/// parasitic photons: the narrowest band's width converted to rad/s at the
/// degenerate wavelength.
pub fn collection_bandwidth_bound<T: Real>(source: &PairSource<T>) -> Result<T> {
    let grating = source.grating().ok_or_else(|| {
        Error::invalid("collection bound", "source has no grating".to_string())
    })?;
    let mut narrowest = T::infinity();
    for band in 0..grating.bands() {
        narrowest = narrowest.min(grating.stop_band_width(source.fiber(), band)?);
    }
    let lambda_d = vacuum_lambda(source.pump().omega_degenerate());
    Ok(T::TAU() * T::lit(SPEED_OF_LIGHT) * narrowest / (lambda_d * lambda_d))
}

/// Default collection filter: a quarter of the stop-band bound.
pub fn default_filter_width<T: Real>(source: &PairSource<T>) -> Result<T> {
    Ok(collection_bandwidth_bound(source)? * T::lit(0.25))
}

/// Parasitic-to-cross intensity ratios at the designed filter points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParasiticRatios<T> {
    /// |phi_xx(w_d, w_Bx)|^2 / |phi_xy(w_d, w_d)|^2.
    pub r_x: T,
    /// |phi_yy(w_By, w_d)|^2 / |phi_xy(w_d, w_d)|^2.
    pub r_y: T,
}

impl<T: Real> ParasiticRatios<T> {
    /// The CAR denominator factor (1 + 9/4 r_x)(1 + 9/4 r_y).
    pub fn car_product(&self) -> T {
        let w = T::lit(9.0 / 4.0);
        (T::one() + w * self.r_x) * (T::one() + w * self.r_y)
    }
}

/// Normalized amplitude at an exact frequency pair: a direct point
/// evaluation scaled by the grid's normalization, never an interpolation.
fn normalized_point<T: Real>(
    source: &PairSource<T>,
    grids: &ProcessGrids<T>,
    process: ProcessLabel,
    omega_1: T,
    omega_2: T,
) -> Result<Complex<T>> {
    let grid = grids.get(process);
    if !grid.is_normalized() {
        return Err(Error::invalid(
            "metrics input",
            format!("{} grid is not normalized", process.name()),
        ));
    }
    let raw = source.jsa_point(process, omega_1, omega_2, Backend::ClosedForm)?;
    Ok(raw / grid.normalization().sqrt())
}

/// The frequencies the detection model keys on: the filter center and the
/// parasitic partner each pump maps it to.
fn detection_points<T: Real>(source: &PairSource<T>, center: T) -> (T, T, T) {
    let two = T::lit(2.0);
    let partner_x = two * source.pump().omega_x() - center;
    let partner_y = two * source.pump().omega_y() - center;
    (center, partner_x, partner_y)
}

/// Parasitic-to-cross intensity ratios of a source, with the filter at the
/// degenerate frequency.
pub fn parasitic_ratios<T: Real>(
    source: &PairSource<T>,
    grids: &ProcessGrids<T>,
) -> Result<ParasiticRatios<T>> {
    let (center, partner_x, partner_y) =
        detection_points(source, source.pump().omega_degenerate());
    let cross = normalized_point(source, grids, ProcessLabel::Xy, center, center)?.norm_sqr();
    if !(cross > T::zero() && cross.is_finite()) {
        return Err(Error::invalid(
            "parasitic ratios",
            "cross-process amplitude vanishes at the filter center".to_string(),
        ));
    }
    let xx = normalized_point(source, grids, ProcessLabel::Xx, center, partner_x)?.norm_sqr();
    let yy = normalized_point(source, grids, ProcessLabel::Yy, partner_y, center)?.norm_sqr();
    Ok(ParasiticRatios { r_x: xx / cross, r_y: yy / cross })
}

/// Singles and coincidence rates per pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountRates<T> {
    pub singles_x: T,
    pub singles_y: T,
    pub coincidences: T,
}

/// Narrow-filter counts: point evaluations at the filter center and the
/// parasitic partners, times the filter area.
pub fn counts_pointwise<T: Real>(
    zeta_xy_sq: T,
    detection: &DetectionConfig<T>,
    source: &PairSource<T>,
    grids: &ProcessGrids<T>,
) -> Result<CountRates<T>> {
    check_strength(zeta_xy_sq)?;
    detection.validate_for(source)?;
    let (center, partner_x, partner_y) = detection_points(source, detection.filter_center);
    let cross = normalized_point(source, grids, ProcessLabel::Xy, center, center)?.norm_sqr();
    if !(cross > T::zero() && cross.is_finite()) {
        return Err(Error::invalid(
            "pointwise counts",
            "cross-process amplitude vanishes at the filter center".to_string(),
        ));
    }
    let xx = normalized_point(source, grids, ProcessLabel::Xx, center, partner_x)?.norm_sqr();
    let yy = normalized_point(source, grids, ProcessLabel::Yy, partner_y, center)?.norm_sqr();

    let weight = T::lit(9.0 / 4.0);
    let area = zeta_xy_sq * detection.filter_width * detection.filter_width;
    Ok(CountRates {
        singles_x: detection.dark_x + detection.efficiency_x * area * (cross + weight * xx),
        singles_y: detection.dark_y + detection.efficiency_y * area * (cross + weight * yy),
        coincidences: detection.efficiency_x * detection.efficiency_y * area * cross,
    })
}

/// Counts with the top-hat filters integrated numerically instead of the
/// point approximation: coincidences integrate |phi_xy|^2 over both filter
/// windows; each singles channel integrates its filtered photon over the
/// window and the partner photon over the whole grid axis.
pub fn counts_integrated<T: Real>(
    zeta_xy_sq: T,
    detection: &DetectionConfig<T>,
    source: &PairSource<T>,
    grids: &ProcessGrids<T>,
) -> Result<CountRates<T>> {
    check_strength(zeta_xy_sq)?;
    detection.validate_for(source)?;
    let axis = grids.xy.axis1();
    let half = detection.filter_width * T::lit(0.5);
    let (lo, hi) = (detection.filter_center - half, detection.filter_center + half);
    if lo < axis.min() || hi > axis.max() {
        return Err(Error::invalid(
            "filter window",
            format!(
                "[{lo}, {hi}] rad/s extends beyond the grid axis [{}, {}]",
                axis.min(),
                axis.max()
            ),
        ));
    }

    let scale = |process: ProcessLabel| grids.get(process).normalization();
    let point = |process: ProcessLabel, w1: T, w2: T| -> Result<T> {
        Ok(source.jsa_point(process, w1, w2, Backend::ClosedForm)?.norm_sqr())
    };

    // Coincidences: both photons inside their filters.
    let mut cross_both = T::zero();
    for (w1, weight_1) in quad::nodes(lo, hi) {
        for (w2, weight_2) in quad::nodes(lo, hi) {
            cross_both += point(ProcessLabel::Xy, w1, w2)? * weight_1 * weight_2;
        }
    }
    cross_both /= scale(ProcessLabel::Xy);

    // Singles: filtered photon against the unfiltered partner's marginal,
    // taken as a Riemann sum over the grid axis. The co-polarized process
    // counts twice (either photon can land in the filter), giving 9/4 with
    // its 9/8 relative strength.
    let marginal = |process: ProcessLabel, filtered_first: bool| -> Result<T> {
        let mut total = T::zero();
        for (w, weight) in quad::nodes(lo, hi) {
            let mut row = T::zero();
            for &other in axis.values() {
                row += if filtered_first {
                    point(process, w, other)?
                } else {
                    point(process, other, w)?
                };
            }
            total += row * axis.step() * weight;
        }
        Ok(total / scale(process))
    };
    let weight = T::lit(9.0 / 4.0);
    let singles_x = marginal(ProcessLabel::Xy, true)? + weight * marginal(ProcessLabel::Xx, true)?;
    let singles_y =
        marginal(ProcessLabel::Xy, false)? + weight * marginal(ProcessLabel::Yy, false)?;

    let eta_x = detection.efficiency_x;
    let eta_y = detection.efficiency_y;
    Ok(CountRates {
        singles_x: detection.dark_x + eta_x * zeta_xy_sq * singles_x,
        singles_y: detection.dark_y + eta_y * zeta_xy_sq * singles_y,
        coincidences: eta_x * eta_y * zeta_xy_sq * cross_both,
    })
}

fn check_strength<T: Real>(zeta_xy_sq: T) -> Result<()> {
    if !(zeta_xy_sq >= T::zero() && zeta_xy_sq.is_finite()) {
        return Err(Error::invalid(
            "interaction strength",
            format!("must be nonnegative and finite, got {zeta_xy_sq}"),
        ));
    }
    Ok(())
}

/// Coincidence-to-accidental ratio at composite strength
/// `zeta_sq = |zeta_xy|^2 delta^2 |phi_xy(w_d, w_d)|^2`.
pub fn car<T: Real>(zeta_sq: T, ratios: &ParasiticRatios<T>) -> T {
    debug_assert!(zeta_sq > T::zero());
    (zeta_sq * ratios.car_product()).recip()
}

/// CAR swept over composite pump strengths for one source configuration.
#[derive(Clone, Debug)]
pub struct CarCurve<T> {
    zeta_sq: Vec<T>,
    car: Vec<T>,
    ratios: ParasiticRatios<T>,
    grating_enabled: bool,
}

impl<T: Real> CarCurve<T> {
    /// Composite strength samples, log-spaced, ascending.
    pub fn zeta_sq(&self) -> &[T] {
        &self.zeta_sq
    }

    pub fn car_values(&self) -> &[T] {
        &self.car
    }

    pub fn ratios(&self) -> ParasiticRatios<T> {
        self.ratios
    }

    pub fn grating_enabled(&self) -> bool {
        self.grating_enabled
    }

    pub fn len(&self) -> usize {
        self.zeta_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta_sq.is_empty()
    }

    /// The idealized ceiling 1/zeta_sq at sample `index`.
    pub fn ideal_max(&self, index: usize) -> T {
        self.zeta_sq[index].recip()
    }
}

/// Sweeps the CAR over log-spaced composite strengths, computing the
/// parasitic ratios once from the given configuration.
pub fn car_sweep<T: Real>(
    source: &PairSource<T>,
    grids: &ProcessGrids<T>,
    zeta_sq_low: T,
    zeta_sq_high: T,
    samples: usize,
) -> Result<CarCurve<T>> {
    if !(zeta_sq_low > T::zero() && zeta_sq_low < zeta_sq_high && zeta_sq_high.is_finite()) {
        return Err(Error::invalid(
            "strength sweep range",
            format!("must satisfy 0 < low < high, got ({zeta_sq_low}, {zeta_sq_high})"),
        ));
    }
    if samples < 2 {
        return Err(Error::invalid(
            "strength sweep samples",
            format!("need at least 2, got {samples}"),
        ));
    }
    let ratios = parasitic_ratios(source, grids)?;
    let log_low = zeta_sq_low.ln();
    let log_step = (zeta_sq_high / zeta_sq_low).ln() / T::lit((samples - 1) as f64);
    let zeta_sq: Vec<T> = (0..samples)
        .map(|i| {
            // Endpoints stay exact; rounding in exp(ln x) must not leak into
            // the reported range.
            if i == 0 {
                zeta_sq_low
            } else if i == samples - 1 {
                zeta_sq_high
            } else {
                (log_low + log_step * T::lit(i as f64)).exp()
            }
        })
        .collect();
    let car_values = zeta_sq.iter().map(|&z| car(z, &ratios)).collect();
    Ok(CarCurve {
        zeta_sq,
        car: car_values,
        ratios,
        grating_enabled: source.grating().is_some(),
    })
}
