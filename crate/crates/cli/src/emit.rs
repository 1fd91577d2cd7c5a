//! Deterministic artifact emitters: CSV matrices with wavelength axis
//! labels, 8-bit PGM renders, and sorted-key JSON. Identical inputs yield
//! byte-identical files.

use anyhow::{Context, Result};
use sfwm_core::spectrum::GridAxis;
use sfwm_core::vacuum_lambda;
use std::fs;
use std::path::Path;

use crate::config::NM;

/// Relative floor of the logarithmic heatmap mapping.
pub const LOG_FLOOR: f64 = 1e-12;

/// Nine significant digits, enough to round-trip through the text form.
pub fn sig9(value: f64) -> String {
    format!("{value:.8e}")
}

/// Matrix CSV: first row and column carry the axis wavelengths in nm, the
/// corner holds a literal `0`. Rows follow `axis1` in ascending frequency.
pub fn heatmap_csv(
    axis1: &GridAxis<f64>,
    axis2: &GridAxis<f64>,
    value: impl Fn(usize, usize) -> f64,
) -> String {
    let (rows, cols) = (axis1.len(), axis2.len());
    let mut out = String::with_capacity((rows + 1) * (cols + 1) * 16);
    out.push('0');
    for j in 0..cols {
        out.push(',');
        out.push_str(&sig9(vacuum_lambda(axis2.at(j)) / NM));
    }
    out.push('\n');
    for i in 0..rows {
        out.push_str(&sig9(vacuum_lambda(axis1.at(i)) / NM));
        for j in 0..cols {
            out.push(',');
            out.push_str(&sig9(value(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Binary 8-bit grayscale PGM. Linear mapping scales by the peak; the
/// logarithmic mapping spans [LOG_FLOOR * peak, peak] in log10, stated in
/// a header comment.
pub fn heatmap_pgm(
    rows: usize,
    cols: usize,
    log_mapping: bool,
    value: impl Fn(usize, usize) -> f64,
) -> Vec<u8> {
    let mut peak = f64::MIN_POSITIVE;
    for i in 0..rows {
        for j in 0..cols {
            peak = peak.max(value(i, j));
        }
    }
    let mapping = if log_mapping {
        format!("# log10 mapping, floor {LOG_FLOOR:e} of peak {}\n", sig9(peak))
    } else {
        format!("# linear mapping, peak {}\n", sig9(peak))
    };
    let mut out = format!("P5\n{mapping}{cols} {rows}\n255\n").into_bytes();
    out.reserve(rows * cols);
    let decades = -LOG_FLOOR.log10();
    for i in 0..rows {
        for j in 0..cols {
            let rel = (value(i, j) / peak).clamp(0.0, 1.0);
            let level = if log_mapping {
                (rel.max(LOG_FLOOR).log10() + decades) / decades
            } else {
                rel
            };
            out.push((level * 255.0).round() as u8);
        }
    }
    out
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// Pretty JSON with a trailing newline; `serde_json` maps iterate sorted,
/// so the key order is stable.
pub fn json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    text
}
