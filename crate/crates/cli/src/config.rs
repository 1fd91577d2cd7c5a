//! Run configuration: a single JSON document with strict keys, defaulting
//! to the worked example the crate is built around. Wavelengths in the
//! file are vacuum nanometers; everything downstream runs in rad/s.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use sfwm_core::dispersion::FiberSpec;
use sfwm_core::grating::GratingSpec;
use sfwm_core::metrics::{default_filter_width, DetectionConfig};
use sfwm_core::spectrum::{GridAxis, PairSource, PumpConfig};
use sfwm_core::vacuum_omega;
use std::fs;
use std::path::Path;

pub const NM: f64 = 1e-9;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub fiber: FiberSection,
    pub pumps: PumpSection,
    pub grating: GratingSection,
    pub detection: DetectionSection,
    pub grid: GridSection,
    pub outputs: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberSection {
    pub length_m: f64,
    pub birefringence: f64,
}

impl Default for FiberSection {
    fn default() -> Self {
        FiberSection { length_m: 0.05, birefringence: 3.3e-5 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    /// Degenerate wavelength the pump placement is solved around.
    pub degenerate_nm: f64,
    pub duration_ps: f64,
    /// Explicit pump wavelengths; both or neither. When absent the solver
    /// places the pumps.
    pub lambda_x_nm: Option<f64>,
    pub lambda_y_nm: Option<f64>,
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            degenerate_nm: 1550.0,
            duration_ps: 10.0,
            lambda_x_nm: None,
            lambda_y_nm: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GratingSection {
    pub enabled: bool,
    pub centers_nm: Vec<f64>,
    pub index_contrast: f64,
    pub coupling_scale: f64,
}

impl Default for GratingSection {
    fn default() -> Self {
        GratingSection {
            enabled: true,
            centers_nm: vec![1540.0, 1560.0],
            index_contrast: 2.1e-3,
            coupling_scale: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionSection {
    pub efficiency_x: f64,
    pub efficiency_y: f64,
    pub dark_x: f64,
    pub dark_y: f64,
    /// Filter center; the degenerate frequency when absent.
    pub filter_center_nm: Option<f64>,
    /// Filter width in rad/s; a quarter of the stop-band bound when absent.
    pub filter_width_rad_s: Option<f64>,
}

impl Default for DetectionSection {
    fn default() -> Self {
        DetectionSection {
            efficiency_x: 1.0,
            efficiency_y: 1.0,
            dark_x: 0.0,
            dark_y: 0.0,
            filter_center_nm: None,
            filter_width_rad_s: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub window_nm: [f64; 2],
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { window_nm: [1535.0, 1565.0], points: 1001 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub csv: bool,
    pub pgm: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "sfwm-out".to_string(), csv: true, pgm: true }
    }
}

impl RunConfig {
    /// Loads and validates a config file; `None` yields the defaults.
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let config: RunConfig = match path {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("cannot parse config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        config.validate()?;
        Ok(config)
    }

    /// Field-path validation of everything the domain constructors would
    /// reject, so errors name the offending config key.
    fn validate(&self) -> Result<()> {
        if !(self.fiber.length_m > 0.0 && self.fiber.length_m.is_finite()) {
            bail!("fiber.length_m: must be positive and finite, got {}", self.fiber.length_m);
        }
        if !(self.fiber.birefringence >= 0.0 && self.fiber.birefringence.is_finite()) {
            bail!(
                "fiber.birefringence: must be nonnegative and finite, got {}",
                self.fiber.birefringence
            );
        }
        if !(self.pumps.degenerate_nm > 0.0 && self.pumps.degenerate_nm.is_finite()) {
            bail!(
                "pumps.degenerate_nm: must be positive and finite, got {}",
                self.pumps.degenerate_nm
            );
        }
        if !(self.pumps.duration_ps > 0.0 && self.pumps.duration_ps.is_finite()) {
            bail!("pumps.duration_ps: must be positive and finite, got {}", self.pumps.duration_ps);
        }
        if self.pumps.lambda_x_nm.is_some() != self.pumps.lambda_y_nm.is_some() {
            bail!("pumps.lambda_x_nm / pumps.lambda_y_nm: set both or neither");
        }
        if self.grating.centers_nm.is_empty() || self.grating.centers_nm.len() > 2 {
            bail!(
                "grating.centers_nm: need one or two stop-band centers, got {}",
                self.grating.centers_nm.len()
            );
        }
        for (i, center) in self.grating.centers_nm.iter().enumerate() {
            if !(*center > 0.0 && center.is_finite()) {
                bail!("grating.centers_nm[{i}]: must be positive, got {center}");
            }
        }
        if !(self.grating.index_contrast >= 0.0 && self.grating.index_contrast.is_finite()) {
            bail!(
                "grating.index_contrast: must be nonnegative, got {}",
                self.grating.index_contrast
            );
        }
        if !(self.grating.coupling_scale > 0.0 && self.grating.coupling_scale <= 1.0) {
            bail!(
                "grating.coupling_scale: must lie in (0, 1], got {}",
                self.grating.coupling_scale
            );
        }
        for (name, value) in [
            ("detection.efficiency_x", self.detection.efficiency_x),
            ("detection.efficiency_y", self.detection.efficiency_y),
        ] {
            if !(0.0..=1.0).contains(&value) {
                bail!("{name}: must lie in [0, 1], got {value}");
            }
        }
        for (name, value) in [
            ("detection.dark_x", self.detection.dark_x),
            ("detection.dark_y", self.detection.dark_y),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                bail!("{name}: must be nonnegative, got {value}");
            }
        }
        if let Some(width) = self.detection.filter_width_rad_s {
            if !(width > 0.0 && width.is_finite()) {
                bail!("detection.filter_width_rad_s: must be positive, got {width}");
            }
        }
        let [low, high] = self.grid.window_nm;
        if !(low > 0.0 && high > low) {
            bail!("grid.window_nm: need 0 < low < high, got [{low}, {high}]");
        }
        if self.grid.points < 2 {
            bail!("grid.points: need at least 2, got {}", self.grid.points);
        }
        Ok(())
    }

    pub fn fiber_spec(&self) -> Result<FiberSpec<f64>> {
        FiberSpec::new(self.fiber.length_m, self.fiber.birefringence)
            .map_err(|e| anyhow!("fiber: {e}"))
    }

    pub fn pump_config(&self) -> Result<PumpConfig<f64>> {
        let duration = self.pumps.duration_ps * 1e-12;
        match (self.pumps.lambda_x_nm, self.pumps.lambda_y_nm) {
            (Some(x), Some(y)) => {
                PumpConfig::new(x * NM, y * NM, duration).map_err(|e| anyhow!("pumps: {e}"))
            }
            _ => {
                let solution = self
                    .fiber_spec()?
                    .solve_pump_placement(self.pumps.degenerate_nm * NM)
                    .map_err(|e| anyhow!("pumps: {e}"))?;
                PumpConfig::from_solution(&solution, duration).map_err(|e| anyhow!("pumps: {e}"))
            }
        }
    }

    pub fn grating_spec(&self) -> Result<GratingSpec<f64>> {
        let centers: Vec<f64> = self.grating.centers_nm.iter().map(|c| c * NM).collect();
        GratingSpec::new(
            &centers,
            self.grating.index_contrast,
            self.grating.coupling_scale,
            self.fiber.length_m,
        )
        .map_err(|e| anyhow!("grating: {e}"))
    }

    /// The configured source; `drop_grating` forces the bare fiber.
    pub fn source(&self, drop_grating: bool) -> Result<PairSource<f64>> {
        let grating = if self.grating.enabled && !drop_grating {
            Some(self.grating_spec()?)
        } else {
            None
        };
        PairSource::new(self.fiber_spec()?, grating, self.pump_config()?)
            .map_err(|e| anyhow!("config: {e}"))
    }

    pub fn axis(&self, points_override: Option<usize>) -> Result<GridAxis<f64>> {
        let points = points_override.unwrap_or(self.grid.points);
        GridAxis::from_wavelength_window(
            self.grid.window_nm[0] * NM,
            self.grid.window_nm[1] * NM,
            points,
        )
        .map_err(|e| anyhow!("grid: {e}"))
    }

    /// Detection settings resolved against a source: the filter centers on
    /// the degenerate frequency and spans a quarter stop band by default.
    pub fn detection(&self, source: &PairSource<f64>) -> Result<DetectionConfig<f64>> {
        let center = match self.detection.filter_center_nm {
            Some(nm) => vacuum_omega(nm * NM),
            None => source.pump().omega_degenerate(),
        };
        let width = match self.detection.filter_width_rad_s {
            Some(width) => width,
            None => {
                // The bound needs a grating; fall back to the configured
                // grating parameters even when the run disables it.
                let reference = if source.grating().is_some() {
                    source.clone()
                } else {
                    PairSource::new(
                        self.fiber_spec()?,
                        Some(self.grating_spec()?),
                        *source.pump(),
                    )
                    .map_err(|e| anyhow!("detection: {e}"))?
                };
                default_filter_width(&reference).map_err(|e| anyhow!("detection: {e}"))?
            }
        };
        let detection = DetectionConfig::new(
            self.detection.efficiency_x,
            self.detection.efficiency_y,
            self.detection.dark_x,
            self.detection.dark_y,
            center,
            width,
        )
        .map_err(|e| anyhow!("detection: {e}"))?;
        detection.validate_for(source).map_err(|e| anyhow!("detection: {e}"))?;
        Ok(detection)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_describe_the_worked_example() {
        let config = RunConfig::default();
        assert!(config.validate().is_ok());
        assert_eq!(config.fiber.length_m, 0.05);
        assert_eq!(config.grating.centers_nm, vec![1540.0, 1560.0]);
        assert_eq!(config.grid.points, 1001);
        let pump = config.pump_config().unwrap();
        assert!((pump.lambda_x() * 1e9 - 1545.0).abs() < 0.3);
        assert!((pump.lambda_y() * 1e9 - 1555.0).abs() < 0.3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"fibre": {}}"#).unwrap_err();
        assert!(err.to_string().contains("fibre"));
        let err =
            serde_json::from_str::<RunConfig>(r#"{"fiber": {"length_mm": 50}}"#).unwrap_err();
        assert!(err.to_string().contains("length_mm"));
    }

    #[test]
    fn validation_names_the_field_path() {
        let mut config = RunConfig::default();
        config.fiber.length_m = -1.0;
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("fiber.length_m"));

        let mut config = RunConfig::default();
        config.pumps.lambda_x_nm = Some(1545.0);
        assert!(config.validate().unwrap_err().to_string().contains("pumps.lambda_"));

        let mut config = RunConfig::default();
        config.grating.coupling_scale = 1.5;
        assert!(config
            .validate()
            .unwrap_err()
            .to_string()
            .contains("grating.coupling_scale"));
    }

    #[test]
    fn explicit_pumps_bypass_the_solver() {
        let mut config = RunConfig::default();
        config.pumps.lambda_x_nm = Some(1544.0);
        config.pumps.lambda_y_nm = Some(1556.0);
        let pump = config.pump_config().unwrap();
        assert_eq!(pump.lambda_x(), 1544.0 * NM);
        assert_eq!(pump.lambda_y(), 1556.0 * NM);
    }
}
