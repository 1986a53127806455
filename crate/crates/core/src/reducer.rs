//! Flicker reduction by mean-pixel reconstruction.
//!
//! For a flagged pair `(F[a], F[b])` a reconstructed frame carries the
//! channelwise mean of the two source pixels wherever the flicker map is set.
//! By default that frame is inserted between the pair; replace mode instead
//! overwrites the flagged pixels of `F[b]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detector::{detect_maps, DetectorConfig, FlickerMap, FlickerReport};
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::palette::Rgb;

/// What unflagged pixels of a reconstructed frame contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionFill {
    /// Copy of the earlier frame.
    #[default]
    Earlier,
    /// Mean of both frames everywhere.
    FullMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    /// Reconstructed frames are inserted; the sequence grows.
    #[default]
    Insert,
    /// Flagged pixels of the later frame are overwritten; length is kept.
    Replace,
}

impl FromStr for ReductionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "insert" => Ok(ReductionMode::Insert),
            "replace" => Ok(ReductionMode::Replace),
            _ => Err(Error::invalid(
                "reduction mode",
                format!("{s:?} (expected insert or replace)"),
            )),
        }
    }
}

impl fmt::Display for ReductionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionMode::Insert => "insert",
            ReductionMode::Replace => "replace",
        })
    }
}

#[inline]
pub fn mean_pixel(a: Rgb, b: Rgb) -> Rgb {
    Rgb {
        r: 0.5 * (a.r + b.r),
        g: 0.5 * (a.g + b.g),
        b: 0.5 * (a.b + b.b),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedFrame {
    pub frame: Frame,
    pub pair_index: usize,
    pub mask: FlickerMap,
}

pub fn reconstruct_frame(
    fa: &Frame,
    fb: &Frame,
    map: &FlickerMap,
    fill: ReconstructionFill,
) -> Result<ReconstructedFrame> {
    fa.check_same_size(fb)?;
    map.check_frame(fa)?;
    let pixels = fa
        .pixels()
        .iter()
        .zip(fb.pixels())
        .zip(&map.flags)
        .map(|((&a, &b), &flag)| match (flag, fill) {
            (true, _) | (false, ReconstructionFill::FullMean) => mean_pixel(a, b),
            (false, ReconstructionFill::Earlier) => a,
        })
        .collect();
    Ok(ReconstructedFrame {
        frame: fa.with_pixels(pixels),
        pair_index: map.pair_index,
        mask: map.clone(),
    })
}

fn check_maps(seq: &FrameSequence, maps: &[FlickerMap]) -> Result<()> {
    if maps.len() != seq.pair_count() {
        return Err(Error::MapMismatch {
            maps: maps.len(),
            pairs: seq.pair_count(),
        });
    }
    for map in maps {
        map.check_frame(&seq.frames()[0])?;
    }
    Ok(())
}

/// Inserts a reconstructed frame after `F[a]` for every pair with a flag.
pub fn insert_frames(
    seq: &FrameSequence,
    maps: &[FlickerMap],
    fill: ReconstructionFill,
) -> Result<FrameSequence> {
    check_maps(seq, maps)?;
    let flagged = maps.iter().filter(|m| m.any()).count();
    let mut out = Vec::with_capacity(seq.len() + flagged);
    for (i, frame) in seq.frames().iter().enumerate() {
        out.push(frame.clone());
        if let Some(map) = maps.get(i).filter(|m| m.any()) {
            let next = &seq.frames()[i + 1];
            out.push(reconstruct_frame(frame, next, map, fill)?.frame);
        }
    }
    rebuild(seq, out)
}

/// Overwrites flagged pixels of each `F[b]` with the mean against the
/// original `F[a]`. Length is preserved; `F[0]` is never modified.
pub fn replace_frames(seq: &FrameSequence, maps: &[FlickerMap]) -> Result<FrameSequence> {
    check_maps(seq, maps)?;
    let frames = seq.frames();
    let mut out = Vec::with_capacity(seq.len());
    out.push(frames[0].clone());
    for (i, map) in maps.iter().enumerate() {
        let (fa, fb) = (&frames[i], &frames[i + 1]);
        if map.any() {
            // mean at flags, F[b] elsewhere
            let pixels = fa
                .pixels()
                .iter()
                .zip(fb.pixels())
                .zip(&map.flags)
                .map(|((&a, &b), &flag)| if flag { mean_pixel(a, b) } else { b })
                .collect();
            out.push(fb.with_pixels(pixels));
        } else {
            out.push(fb.clone());
        }
    }
    rebuild(seq, out)
}

fn rebuild(seq: &FrameSequence, frames: Vec<Frame>) -> Result<FrameSequence> {
    let out = FrameSequence::new(frames)?;
    match seq.fps() {
        Some(fps) => out.with_fps(fps),
        None => Ok(out),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub mode: ReductionMode,
    pub fill: ReconstructionFill,
    pub frames_before: usize,
    pub frames_after: usize,
    pub flagged_pairs: usize,
    pub before_ratio: f64,
    pub after_ratio: f64,
    pub percent_reduction: f64,
    pub max_step_before: f64,
    pub max_step_after: f64,
    pub before: FlickerReport,
    pub after: FlickerReport,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub sequence: FrameSequence,
    pub maps: Vec<FlickerMap>,
    pub report: ReductionReport,
}

/// Detects, reduces, and re-detects a sequence.
pub fn reduce(
    seq: &FrameSequence,
    config: &DetectorConfig,
    mode: ReductionMode,
    fill: ReconstructionFill,
) -> Result<Reduction> {
    let maps = detect_maps(seq, config)?;
    let sequence = match mode {
        ReductionMode::Insert => insert_frames(seq, &maps, fill)?,
        ReductionMode::Replace => replace_frames(seq, &maps)?,
    };
    let report = reduction_report_with_maps(seq, &sequence, &maps, config, mode, fill)?;
    Ok(Reduction {
        sequence,
        maps,
        report,
    })
}

/// Compares flicker before and after reduction.
///
/// `after` must have been produced from `before` with the same detector
/// configuration and `mode`.
pub fn reduction_report(
    before: &FrameSequence,
    after: &FrameSequence,
    config: &DetectorConfig,
    mode: ReductionMode,
    fill: ReconstructionFill,
) -> Result<ReductionReport> {
    let maps = detect_maps(before, config)?;
    reduction_report_with_maps(before, after, &maps, config, mode, fill)
}

fn max_channel_step(a: Rgb, b: Rgb) -> f64 {
    a.channels()
        .iter()
        .zip(b.channels())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn reduction_report_with_maps(
    before: &FrameSequence,
    after: &FrameSequence,
    maps: &[FlickerMap],
    config: &DetectorConfig,
    mode: ReductionMode,
    fill: ReconstructionFill,
) -> Result<ReductionReport> {
    let flagged_pairs = maps.iter().filter(|m| m.any()).count();
    let expected_len = match mode {
        ReductionMode::Insert => before.len() + flagged_pairs,
        ReductionMode::Replace => before.len(),
    };
    if after.len() != expected_len {
        return Err(Error::invalid(
            "reduced sequence",
            format!(
                "{} frames, expected {expected_len} for {mode} mode over {flagged_pairs} flagged pair(s)",
                after.len()
            ),
        ));
    }
    before.frames()[0].check_same_size(&after.frames()[0])?;

    let before_report = FlickerReport::from_maps(maps, false);
    let after_report = FlickerReport::from_maps(&detect_maps(after, config)?, false);

    let src = before.frames();
    let out = after.frames();
    let mut max_step_before = 0.0f64;
    let mut max_step_after = 0.0f64;
    // position of src[i] inside `out`
    let mut pos = 0usize;
    for (i, map) in maps.iter().enumerate() {
        let flagged = map.any();
        for (p, _) in map.flags.iter().enumerate().filter(|(_, &f)| f) {
            let (a, b) = (src[i].pixels()[p], src[i + 1].pixels()[p]);
            max_step_before = max_step_before.max(max_channel_step(a, b));
            let after_step = match mode {
                ReductionMode::Insert => {
                    let r = out[pos + 1].pixels()[p];
                    max_channel_step(out[pos].pixels()[p], r)
                        .max(max_channel_step(r, out[pos + 2].pixels()[p]))
                }
                ReductionMode::Replace => {
                    max_channel_step(out[i].pixels()[p], out[i + 1].pixels()[p])
                }
            };
            max_step_after = max_step_after.max(after_step);
        }
        pos += if flagged && mode == ReductionMode::Insert {
            2
        } else {
            1
        };
    }

    let before_ratio = before_report.aggregate_ratio;
    let after_ratio = after_report.aggregate_ratio;
    let percent_reduction = if before_ratio > 0.0 {
        100.0 * (before_ratio - after_ratio) / before_ratio
    } else {
        0.0
    };
    Ok(ReductionReport {
        mode,
        fill,
        frames_before: before.len(),
        frames_after: after.len(),
        flagged_pairs,
        before_ratio,
        after_ratio,
        percent_reduction,
        max_step_before,
        max_step_after,
        before: before_report,
        after: after_report,
    })
}
