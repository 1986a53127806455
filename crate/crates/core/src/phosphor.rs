//! Electronic CRT flicker model.
//!
//! The amplitude coefficient of the fundamental frequency of a phosphor's
//! exponentially decaying luminance is `2 / sqrt(1 + (α·2πf)²)`, where `α`
//! is the phosphor decay time and `f` the refresh rate. Short-decay
//! phosphors keep a larger coefficient at a given rate.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::format_sig6;

/// Typical viewing distance, millimeters.
pub const DEFAULT_VIEWING_DISTANCE_MM: f64 = 500.0;
/// Conventional pixel pitch for resolution sweeps, mm per pixel.
pub const DEFAULT_PIXEL_PITCH_MM: f64 = 0.25;

const BUILTIN_PHOSPHORS: &str = include_str!("../data/phosphors.toml");

fn non_negative(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(
            name,
            format!("{v} must be finite and non-negative"),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phosphor {
    pub name: String,
    /// Decay / persistence time constant, seconds.
    pub alpha: f64,
}

impl Phosphor {
    pub fn new(name: impl Into<String>, alpha: f64) -> Result<Self> {
        Ok(Phosphor {
            name: name.into(),
            alpha: non_negative("phosphor decay time", alpha)?,
        })
    }

    pub fn amp_coeff(&self, refresh_hz: f64) -> Result<f64> {
        amp_coeff(self.alpha, refresh_hz)
    }
}

/// Parses `NAME = alpha_seconds` lines (a flat TOML table).
pub fn parse_phosphors(text: &str, origin: &Path) -> Result<Vec<Phosphor>> {
    let table: BTreeMap<String, toml::Value> = toml::from_str(text).map_err(|e| Error::Config {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut phosphors = Vec::with_capacity(table.len());
    for (name, value) in table {
        let alpha = match value {
            toml::Value::Float(f) => f,
            toml::Value::Integer(i) => i as f64,
            other => {
                return Err(Error::Config {
                    path: origin.to_path_buf(),
                    message: format!(
                        "{name}: expected a number of seconds, found {}",
                        other.type_str()
                    ),
                })
            }
        };
        phosphors.push(Phosphor::new(name, alpha)?);
    }
    if phosphors.is_empty() {
        return Err(Error::Config {
            path: origin.to_path_buf(),
            message: "no phosphors defined".into(),
        });
    }
    // shortest decay first
    phosphors.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(phosphors)
}

pub fn load_phosphors(path: &Path) -> Result<Vec<Phosphor>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_phosphors(&text, path)
}

/// DP104, P31 and D65_P4 with placeholder decay constants.
pub fn builtin_phosphors() -> Vec<Phosphor> {
    parse_phosphors(BUILTIN_PHOSPHORS, Path::new("<builtin phosphors>"))
        .expect("built-in phosphor table is valid")
}

/// `2 / sqrt(1 + (α·ω)²)` with `ω = 2πf`; lies in `(0, 2]`.
pub fn amp_coeff(alpha: f64, refresh_hz: f64) -> Result<f64> {
    let alpha = non_negative("decay time", alpha)?;
    let f = non_negative("refresh rate", refresh_hz)?;
    let aw = alpha * 2.0 * PI * f;
    Ok(2.0 / (1.0 + aw * aw).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplayGeometry {
    /// Display extent, millimeters.
    pub extent_mm: f64,
    /// Viewing distance, millimeters.
    pub viewing_distance_mm: f64,
}

impl DisplayGeometry {
    pub fn new(extent_mm: f64, viewing_distance_mm: f64) -> Result<Self> {
        let extent_mm = non_negative("display extent", extent_mm)?;
        if !(viewing_distance_mm.is_finite() && viewing_distance_mm > 0.0) {
            return Err(Error::invalid(
                "viewing distance",
                format!("{viewing_distance_mm} must be positive"),
            ));
        }
        Ok(DisplayGeometry {
            extent_mm,
            viewing_distance_mm,
        })
    }

    pub fn at_default_distance(extent_mm: f64) -> Result<Self> {
        Self::new(extent_mm, DEFAULT_VIEWING_DISTANCE_MM)
    }
}

pub fn visual_angle_radians(geom: &DisplayGeometry) -> Result<f64> {
    let geom = DisplayGeometry::new(geom.extent_mm, geom.viewing_distance_mm)?;
    Ok(2.0 * (geom.extent_mm / (2.0 * geom.viewing_distance_mm)).atan())
}

/// `2·atan(D / 2V)` in degrees.
pub fn visual_angle(geom: &DisplayGeometry) -> Result<f64> {
    Ok(visual_angle_radians(geom)?.to_degrees())
}

/// Flicker regression divided by luminance decay time.
pub fn flicker_rate(regression: f64, decay_time: f64) -> Result<f64> {
    if !regression.is_finite() {
        return Err(Error::NonFinite {
            name: "flicker regression",
            value: regression,
        });
    }
    if !decay_time.is_finite() || decay_time <= 0.0 {
        return Err(Error::Singularity {
            name: "decay time",
            value: decay_time,
        });
    }
    Ok(regression / decay_time)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefreshSweep {
    pub min_hz: f64,
    pub max_hz: f64,
    pub step_hz: f64,
}

impl RefreshSweep {
    pub fn new(min_hz: f64, max_hz: f64, step_hz: f64) -> Result<Self> {
        let min_hz = non_negative("sweep minimum", min_hz)?;
        if !(max_hz.is_finite() && max_hz > min_hz) {
            return Err(Error::invalid(
                "sweep maximum",
                format!("{max_hz} must exceed {min_hz}"),
            ));
        }
        if !(step_hz.is_finite() && step_hz > 0.0) {
            return Err(Error::invalid(
                "sweep step",
                format!("{step_hz} must be positive"),
            ));
        }
        Ok(RefreshSweep {
            min_hz,
            max_hz,
            step_hz,
        })
    }

    /// Rates `min + k·step` up to and including `max` (to within 1e-9 of a step).
    pub fn rates(&self) -> Vec<f64> {
        let n = ((self.max_hz - self.min_hz) / self.step_hz + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| self.min_hz + k as f64 * self.step_hz)
            .collect()
    }
}

impl std::str::FromStr for RefreshSweep {
    type Err = Error;

    /// `min:max:step`, e.g. `30:120:1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid("sweep", format!("{s:?} (expected min:max:step)"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        RefreshSweep::new(nums[0], nums[1], nums[2])
    }
}

/// Amplitude coefficient per phosphor across a refresh-rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmpCurves {
    pub phosphors: Vec<Phosphor>,
    pub rates_hz: Vec<f64>,
    /// `values[k][p]` is phosphor `p` at `rates_hz[k]`.
    pub values: Vec<Vec<f64>>,
}

impl AmpCurves {
    pub fn column(&self, p: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |row| row[p])
    }

    pub fn header(&self) -> Vec<String> {
        std::iter::once("refresh_hz".to_string())
            .chain(self.phosphors.iter().map(|p| p.name.clone()))
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.rates_hz
            .iter()
            .zip(&self.values)
            .map(|(&f, row)| {
                std::iter::once(format_sig6(f))
                    .chain(row.iter().map(|&v| format_sig6(v)))
                    .collect()
            })
            .collect()
    }
}

pub fn emit_amp_curves(phosphors: &[Phosphor], sweep: &RefreshSweep) -> Result<AmpCurves> {
    if phosphors.is_empty() {
        return Err(Error::invalid(
            "phosphor list",
            "at least one phosphor is required",
        ));
    }
    let sweep = RefreshSweep::new(sweep.min_hz, sweep.max_hz, sweep.step_hz)?;
    let rates_hz = sweep.rates();
    let values = rates_hz
        .iter()
        .map(|&f| {
            phosphors
                .iter()
                .map(|p| p.amp_coeff(f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AmpCurves {
        phosphors: phosphors.to_vec(),
        rates_hz,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleRow {
    pub width: u32,
    pub height: u32,
    pub diagonal_px: f64,
    pub extent_mm: f64,
    pub visual_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleCurve {
    pub pixel_pitch_mm: f64,
    pub viewing_distance_mm: f64,
    pub rows: Vec<AngleRow>,
}

impl AngleCurve {
    pub fn header(&self) -> Vec<String> {
        [
            "width",
            "height",
            "diagonal_px",
            "extent_mm",
            "visual_angle_deg",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.width.to_string(),
                    r.height.to_string(),
                    format_sig6(r.diagonal_px),
                    format_sig6(r.extent_mm),
                    format_sig6(r.visual_angle_deg),
                ]
            })
            .collect()
    }
}

/// Visual angle per display resolution; the display extent is the pixel
/// diagonal times the pitch.
pub fn emit_visual_angle_curve(
    resolutions: &[(u32, u32)],
    pixel_pitch_mm: f64,
    viewing_distance_mm: f64,
) -> Result<AngleCurve> {
    if !(pixel_pitch_mm.is_finite() && pixel_pitch_mm > 0.0) {
        return Err(Error::invalid(
            "pixel pitch",
            format!("{pixel_pitch_mm} must be positive"),
        ));
    }
    let rows = resolutions
        .iter()
        .map(|&(width, height)| {
            let diagonal_px = f64::from(width).hypot(f64::from(height));
            let extent_mm = diagonal_px * pixel_pitch_mm;
            let geom = DisplayGeometry::new(extent_mm, viewing_distance_mm)?;
            Ok(AngleRow {
                width,
                height,
                diagonal_px,
                extent_mm,
                visual_angle_deg: visual_angle(&geom)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngleCurve {
        pixel_pitch_mm,
        viewing_distance_mm,
        rows,
    })
}

/// Parses `640x480,800x600`.
pub fn parse_resolutions(s: &str) -> Result<Vec<(u32, u32)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || Error::invalid("resolution", format!("{p:?} (expected WIDTHxHEIGHT)"));
            let (w, h) = p.trim().split_once(['x', 'X']).ok_or_else(bad)?;
            Ok((w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?))
        })
        .collect()
}
