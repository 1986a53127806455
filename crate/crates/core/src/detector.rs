//! Per-pixel flicker identification between consecutive frames.
//!
//! Each pixel of both frames is quantized onto the palette and the color
//! pair is looked up in one of the stochastic tables. A pixel flickers when
//! that probability is at least the threshold (0.05 by default).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::palette::{quantize, PaletteColor, PALETTE_SIZE};
use crate::stochastic::{CdfMode, ProbabilitySource, StochasticTables};

pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Which frame of a pair selects the table row for asymmetric sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOrientation {
    #[default]
    EarlierRow,
    EarlierColumn,
}

impl FromStr for PairOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "earlier_row" => Ok(PairOrientation::EarlierRow),
            "earlier_column" => Ok(PairOrientation::EarlierColumn),
            _ => Err(Error::invalid(
                "pair orientation",
                format!("{s:?} (expected earlier_row or earlier_column)"),
            )),
        }
    }
}

impl fmt::Display for PairOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairOrientation::EarlierRow => "earlier_row",
            PairOrientation::EarlierColumn => "earlier_column",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub threshold: f64,
    pub source: ProbabilitySource,
    pub mode: CdfMode,
    pub orientation: PairOrientation,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            threshold: DEFAULT_THRESHOLD,
            source: ProbabilitySource::default(),
            mode: CdfMode::default(),
            orientation: PairOrientation::default(),
        }
    }
}

impl DetectorConfig {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_source(mut self, source: ProbabilitySource) -> Self {
        self.source = source;
        self
    }

    pub fn with_mode(mut self, mode: CdfMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_orientation(mut self, orientation: PairOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::invalid(
                "threshold",
                format!("{} is outside [0, 1]", self.threshold),
            ));
        }
        Ok(())
    }

    /// Flag decision for every ordered color pair, `[earlier][later]`.
    fn flag_table(&self) -> [[bool; PALETTE_SIZE]; PALETTE_SIZE] {
        let tables = StochasticTables::shared(self.mode);
        let mut flags = [[false; PALETTE_SIZE]; PALETTE_SIZE];
        for a in PaletteColor::ALL {
            for b in PaletteColor::ALL {
                let (row, col) = match self.orientation {
                    PairOrientation::EarlierRow => (a, b),
                    PairOrientation::EarlierColumn => (b, a),
                };
                let p = tables.pair_probability(row, col, self.source);
                flags[a.index()][b.index()] = p >= self.threshold;
            }
        }
        flags
    }
}

/// Boolean flicker mask for one frame pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlickerMap {
    pub width: usize,
    pub height: usize,
    pub flags: Vec<bool>,
    pub pair_index: usize,
}

impl FlickerMap {
    pub fn empty(width: usize, height: usize, pair_index: usize) -> Self {
        FlickerMap {
            width,
            height,
            flags: vec![false; width * height],
            pair_index,
        }
    }

    pub fn from_flags(
        width: usize,
        height: usize,
        flags: Vec<bool>,
        pair_index: usize,
    ) -> Result<Self> {
        if flags.len() != width * height {
            return Err(Error::invalid(
                "flicker map",
                format!("{} flags for a {width}x{height} frame", flags.len()),
            ));
        }
        Ok(FlickerMap {
            width,
            height,
            flags,
            pair_index,
        })
    }

    pub fn total(&self) -> usize {
        self.flags.len()
    }

    pub fn flagged_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn any(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }

    pub fn is_flagged(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.flags[y * self.width + x]
    }

    /// Flagged `(x, y)` positions in row-major order.
    pub fn locations(&self) -> Vec<(usize, usize)> {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| (i % self.width, i / self.width))
            .collect()
    }

    fn matches_frame(&self, frame: &Frame) -> Result<()> {
        if self.width == frame.width() && self.height == frame.height() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: frame.width(),
                right_height: frame.height(),
            })
        }
    }

    pub(crate) fn check_frame(&self, frame: &Frame) -> Result<()> {
        self.matches_frame(frame)
    }
}

/// Flagged fraction of a map's pixels.
pub fn flicker_ratio(map: &FlickerMap) -> f64 {
    if map.total() == 0 {
        return 0.0;
    }
    map.flagged_count() as f64 / map.total() as f64
}

/// Flags every pixel whose quantized color pair reaches the threshold.
pub fn compare_frames(fa: &Frame, fb: &Frame, config: &DetectorConfig) -> Result<FlickerMap> {
    config.validate()?;
    fa.check_same_size(fb)?;
    let table = config.flag_table();
    Ok(compare_with_table(fa, fb, &table, 0))
}

fn compare_with_table(
    fa: &Frame,
    fb: &Frame,
    table: &[[bool; PALETTE_SIZE]; PALETTE_SIZE],
    pair_index: usize,
) -> FlickerMap {
    let flags = fa
        .pixels()
        .iter()
        .zip(fb.pixels())
        .map(|(&a, &b)| table[quantize(a).index()][quantize(b).index()])
        .collect();
    FlickerMap {
        width: fa.width(),
        height: fa.height(),
        flags,
        pair_index,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub index: usize,
    pub flagged: usize,
    pub total: usize,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locations: Option<Vec<[usize; 2]>>,
}

impl PairReport {
    pub fn from_map(map: &FlickerMap, with_locations: bool) -> Self {
        PairReport {
            index: map.pair_index,
            flagged: map.flagged_count(),
            total: map.total(),
            ratio: flicker_ratio(map),
            locations: with_locations
                .then(|| map.locations().into_iter().map(|(x, y)| [x, y]).collect()),
        }
    }
}

/// Per-pair counts and the unweighted mean ratio over all pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlickerReport {
    pub pairs: Vec<PairReport>,
    pub aggregate_ratio: f64,
}

impl FlickerReport {
    pub fn from_pairs(pairs: Vec<PairReport>) -> Self {
        let uniform = pairs.windows(2).all(|w| w[0].total == w[1].total);
        let aggregate_ratio = if pairs.is_empty() {
            0.0
        } else if uniform && pairs[0].total > 0 {
            // equal totals: the mean of ratios is the pooled ratio, computed with one rounding
            let flagged: usize = pairs.iter().map(|p| p.flagged).sum();
            flagged as f64 / (pairs[0].total * pairs.len()) as f64
        } else {
            pairs.iter().map(|p| p.ratio).sum::<f64>() / pairs.len() as f64
        };
        FlickerReport {
            pairs,
            aggregate_ratio,
        }
    }

    pub fn from_maps(maps: &[FlickerMap], with_locations: bool) -> Self {
        Self::from_pairs(
            maps.iter()
                .map(|m| PairReport::from_map(m, with_locations))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDetection {
    pub maps: Vec<FlickerMap>,
    pub report: FlickerReport,
}

/// Runs [`compare_frames`] over every consecutive pair, in order.
pub fn detect_sequence(seq: &FrameSequence, config: &DetectorConfig) -> Result<SequenceDetection> {
    let maps = detect_maps(seq, config)?;
    let report = FlickerReport::from_maps(&maps, false);
    Ok(SequenceDetection { maps, report })
}

pub(crate) fn detect_maps(seq: &FrameSequence, config: &DetectorConfig) -> Result<Vec<FlickerMap>> {
    config.validate()?;
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort {
            found: seq.len(),
            required: 2,
        });
    }
    let table = config.flag_table();
    let frames = seq.frames();
    Ok((0..seq.pair_count())
        .into_par_iter()
        .map(|i| compare_with_table(&frames[i], &frames[i + 1], &table, i))
        .collect())
}
