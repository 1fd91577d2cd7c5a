//! `sfwm`: command-line front end for the pair-source model. Subcommands
//! report the phase-matched pump placement, the stop-band design numbers,
//! joint spectral intensity heatmaps, and coincidence-to-accidental
//! sweeps. All file artifacts are byte-deterministic for a fixed config.

mod config;
mod emit;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sfwm_core::metrics::{car, car_sweep, parasitic_ratios};
use sfwm_core::spectrum::{Backend, JointAmplitudeGrid, PairSource, ProcessGrids, ProcessLabel};
use std::path::{Path, PathBuf};

use config::{RunConfig, NM};

#[derive(Parser)]
#[command(
    name = "sfwm",
    version,
    about = "Photon-pair source simulator: dual-pump four-wave mixing in a fiber \
             with an engineered Bragg stop band"
)]
struct Cli {
    /// JSON config path; built-in worked-example defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config's `outputs.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the pump placement about the degenerate wavelength.
    Phasematch,
    /// Report the stop-band design numbers.
    Grating,
    /// Compute joint spectral intensity heatmaps (CSV, optional PGM).
    Jsi {
        /// Which process to render; `all` combines them into the weighted
        /// joint intensity.
        #[arg(long, value_enum, default_value_t = ProcessArg::All)]
        process: ProcessArg,
        /// Drop the grating and render the bare fiber.
        #[arg(long)]
        no_grating: bool,
        /// Overlap evaluation: closed form, or quadrature as a cross-check.
        #[arg(long, value_enum, default_value_t = BackendArg::Closed)]
        backend: BackendArg,
        /// Grid points per axis, overriding the config.
        #[arg(long)]
        points: Option<usize>,
        /// Render PGMs with a log10 mapping (floor 1e-12 of peak) instead
        /// of linear.
        #[arg(long)]
        log_heatmap: bool,
    },
    /// Sweep the coincidence-to-accidental ratio over the pump strength.
    Car {
        /// Smallest composite pump strength (dimensionless, squared).
        #[arg(long, default_value_t = 1e-4)]
        zeta2_min: f64,
        /// Largest composite pump strength; ignored with a single step.
        #[arg(long, default_value_t = 1.0)]
        zeta2_max: f64,
        /// Log-spaced sample count from min to max inclusive.
        #[arg(long, default_value_t = 61)]
        zeta2_steps: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProcessArg {
    Xx,
    Yy,
    Xy,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Closed,
    Quadrature,
}

impl From<BackendArg> for Backend {
    fn from(arg: BackendArg) -> Backend {
        match arg {
            BackendArg::Closed => Backend::ClosedForm,
            BackendArg::Quadrature => Backend::Quadrature,
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = RunConfig::load(cli.config.as_deref())?;
    let out_dir = cli.out.unwrap_or_else(|| PathBuf::from(&config.outputs.dir));
    match cli.command {
        Command::Phasematch => cmd_phasematch(&config),
        Command::Grating => cmd_grating(&config),
        Command::Jsi { process, no_grating, backend, points, log_heatmap } => cmd_jsi(
            &config,
            &out_dir,
            process,
            no_grating,
            backend.into(),
            points,
            log_heatmap,
        ),
        Command::Car { zeta2_min, zeta2_max, zeta2_steps } => {
            cmd_car(&config, &out_dir, zeta2_min, zeta2_max, zeta2_steps)
        }
    }
}

fn cmd_phasematch(config: &RunConfig) -> Result<()> {
    let fiber = config.fiber_spec()?;
    let solution = fiber.solve_pump_placement(config.pumps.degenerate_nm * NM)?;
    let (partner_x, partner_y) = solution.parasitic_partners();
    let summary = json!({
        "lambda_degenerate_nm": solution.lambda_degenerate / NM,
        "lambda_pump_x_nm": solution.lambda_pump_x / NM,
        "lambda_pump_y_nm": solution.lambda_pump_y / NM,
        "pump_detuning_rad_s": solution.pump_detuning,
        "parasitic_partner_x_nm": partner_x / NM,
        "parasitic_partner_y_nm": partner_y / NM,
        "residual_mismatch_rad_m": solution.residual_mismatch,
    });
    print!("{}", emit::json_text(&summary));
    Ok(())
}

fn cmd_grating(config: &RunConfig) -> Result<()> {
    let fiber = config.fiber_spec()?;
    let grating = config.grating_spec()?;

    let warning = (grating.index_contrast() == 0.0)
        .then(|| "index contrast is zero: the stop bands vanish".to_string());
    if let Some(text) = &warning {
        eprintln!("warning: {text}");
    }

    let mut bands = Vec::new();
    for band in 0..grating.bands() {
        bands.push(json!({
            "center_nm": grating.center_wavelength(band) / NM,
            "kappa_l": grating.coupling(band) * grating.extent(),
            "kappa_rad_m": grating.coupling(band),
            "period_nm": grating.period(&fiber, band, sfwm_core::dispersion::Polarization::Y)? / NM,
            "stop_band_width_nm": grating.stop_band_width(&fiber, band)? / NM,
        }));
    }
    let carrier = grating.carrier_period(&fiber)?;
    let mut summary = json!({
        "bands": bands,
        "carrier_period_nm": carrier / NM,
        "period_count": (grating.extent() / carrier).round() as u64,
        "beat_period_um": grating.beat_period(&fiber)?.map(|b| b / 1e-6),
    });
    if let Some(text) = warning {
        summary["warning"] = json!(text);
    }
    print!("{}", emit::json_text(&summary));
    Ok(())
}

/// One heatmap artifact: CSV always, PGM when configured.
fn emit_heatmap(
    out_dir: &Path,
    stem: &str,
    config: &RunConfig,
    log_heatmap: bool,
    value: impl Fn(usize, usize) -> f64 + Copy,
    axis1: &sfwm_core::spectrum::GridAxis<f64>,
    axis2: &sfwm_core::spectrum::GridAxis<f64>,
) -> Result<serde_json::Value> {
    let mut entry = serde_json::Map::new();
    if config.outputs.csv {
        let path = out_dir.join(format!("{stem}.csv"));
        emit::write_bytes(&path, emit::heatmap_csv(axis1, axis2, value).as_bytes())?;
        entry.insert("csv".to_string(), json!(path.display().to_string()));
    }
    if config.outputs.pgm {
        let path = out_dir.join(format!("{stem}.pgm"));
        let pgm = emit::heatmap_pgm(axis1.len(), axis2.len(), log_heatmap, value);
        emit::write_bytes(&path, &pgm)?;
        entry.insert("pgm".to_string(), json!(path.display().to_string()));
    }
    Ok(serde_json::Value::Object(entry))
}

fn cmd_jsi(
    config: &RunConfig,
    out_dir: &Path,
    process: ProcessArg,
    no_grating: bool,
    backend: Backend,
    points: Option<usize>,
    log_heatmap: bool,
) -> Result<()> {
    let source = config.source(no_grating)?;
    let axis = config.axis(points)?;
    let n = axis.len();
    let suffix = if source.grating().is_some() { "" } else { "_no_grating" };

    let single = |label: ProcessLabel| -> Result<JointAmplitudeGrid<f64>> {
        Ok(source.jsa_grid(label, &axis, backend)?)
    };

    let mut files = serde_json::Map::new();
    let truncated;
    let peak;
    match process {
        ProcessArg::All => {
            let grids = ProcessGrids {
                xx: single(ProcessLabel::Xx)?,
                yy: single(ProcessLabel::Yy)?,
                xy: single(ProcessLabel::Xy)?,
            };
            truncated = ProcessLabel::ALL.iter().any(|&p| grids.get(p).is_truncated());
            let jsi = grids.jsi()?;
            peak = jsi.peak();
            let values = jsi.values();
            let entry = emit_heatmap(
                out_dir,
                &format!("jsi_all{suffix}"),
                config,
                log_heatmap,
                |i, j| values[i * n + j],
                jsi.axis1(),
                jsi.axis2(),
            )?;
            files.insert("all".to_string(), entry);
        }
        _ => {
            let label = match process {
                ProcessArg::Xx => ProcessLabel::Xx,
                ProcessArg::Yy => ProcessLabel::Yy,
                ProcessArg::Xy => ProcessLabel::Xy,
                ProcessArg::All => unreachable!(),
            };
            let grid = single(label)?;
            truncated = grid.is_truncated();
            let values = grid.values();
            peak = values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
            let entry = emit_heatmap(
                out_dir,
                &format!("jsi_{}{suffix}", label.name()),
                config,
                log_heatmap,
                |i, j| values[i * n + j].norm_sqr(),
                grid.axis1(),
                grid.axis2(),
            )?;
            files.insert(label.name().to_string(), entry);
        }
    }

    let manifest = json!({
        "backend": match backend {
            Backend::ClosedForm => "closed",
            Backend::Quadrature => "quadrature",
        },
        "files": files,
        "grating_enabled": source.grating().is_some(),
        "mapping": if log_heatmap { "log10" } else { "linear" },
        "log_floor_relative": if log_heatmap { Some(emit::LOG_FLOOR) } else { None },
        "peak": peak,
        "points": n,
        "truncated_by_window": truncated,
        "window_nm": config.grid.window_nm,
    });
    print!("{}", emit::json_text(&manifest));
    Ok(())
}

fn cmd_car(
    config: &RunConfig,
    out_dir: &Path,
    zeta2_min: f64,
    zeta2_max: f64,
    zeta2_steps: usize,
) -> Result<()> {
    if !(zeta2_min > 0.0 && zeta2_min.is_finite()) {
        bail!("--zeta2-min: must be positive, got {zeta2_min}");
    }
    if zeta2_steps == 0 {
        bail!("--zeta2-steps: need at least one sample");
    }
    if zeta2_steps > 1 && !(zeta2_max > zeta2_min && zeta2_max.is_finite()) {
        bail!("--zeta2-max: must be finite and exceed --zeta2-min, got {zeta2_max}");
    }

    // Both configurations share the pump and fiber; only the grating
    // differs. The parasitic ratios are computed once per configuration.
    let with = config.source(false)?;
    let with = if with.grating().is_some() {
        with
    } else {
        // The sweep always contrasts the two cases, so a disabled grating
        // still contributes its configured parameters.
        PairSource::new(config.fiber_spec()?, Some(config.grating_spec()?), *with.pump())?
    };
    let without = with.without_grating();
    let axis = config.axis(None)?;
    let grids_with = with.process_grids(&axis, Backend::ClosedForm)?;
    let grids_without = without.process_grids(&axis, Backend::ClosedForm)?;

    // Resolving the detection section enforces the filter-width bound
    // against the stop bands.
    let detection = config.detection(&with)?;
    let ratios_with = parasitic_ratios(&with, &grids_with)?;
    let ratios_without = parasitic_ratios(&without, &grids_without)?;

    // A single step degenerates to a point evaluation; the sweep needs a
    // real range.
    let (zeta2, car_without, car_with) = if zeta2_steps == 1 {
        (
            vec![zeta2_min],
            vec![car(zeta2_min, &ratios_without)],
            vec![car(zeta2_min, &ratios_with)],
        )
    } else {
        let free = car_sweep(&without, &grids_without, zeta2_min, zeta2_max, zeta2_steps)?;
        let guarded = car_sweep(&with, &grids_with, zeta2_min, zeta2_max, zeta2_steps)?;
        (
            guarded.zeta_sq().to_vec(),
            free.car_values().to_vec(),
            guarded.car_values().to_vec(),
        )
    };

    let mut csv = String::from("zeta2,car_no_grating,car_with_grating,ideal_max\n");
    for (i, &z) in zeta2.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            emit::sig9(z),
            emit::sig9(car_without[i]),
            emit::sig9(car_with[i]),
            emit::sig9(1.0 / z),
        ));
    }
    let csv_path = out_dir.join("car.csv");
    emit::write_bytes(&csv_path, csv.as_bytes())?;

    let improvement = ratios_without.car_product() / ratios_with.car_product();
    let summary = json!({
        "car_improvement_factor": improvement,
        "csv": csv_path.display().to_string(),
        "filter_center_rad_s": detection.filter_center,
        "filter_width_rad_s": detection.filter_width,
        "r_x_no_grating": ratios_without.r_x,
        "r_x_with_grating": ratios_with.r_x,
        "r_y_no_grating": ratios_without.r_y,
        "r_y_with_grating": ratios_with.r_y,
        "suppression_db_x": 10.0 * (ratios_with.r_x / ratios_without.r_x).log10(),
        "suppression_db_y": 10.0 * (ratios_with.r_y / ratios_without.r_y).log10(),
        "zeta2": { "max": zeta2[zeta2.len() - 1], "min": zeta2[0], "steps": zeta2_steps },
    });
    let summary_text = emit::json_text(&summary);
    emit::write_bytes(&out_dir.join("car_summary.json"), summary_text.as_bytes())?;
    print!("{summary_text}");
    Ok(())
}
