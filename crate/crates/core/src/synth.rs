//! Synthetic flicker sequences with known ground truth.
//!
//! Even frames are a uniform base color; odd frames repeat them with a fixed
//! set of pixel locations switched to the flicker color. Locations come from
//! a partial Fisher–Yates shuffle driven by the 64-bit LCG
//! `s ← s·6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)`, using the
//! high 32 bits of each state, so any implementation can reproduce them.

use serde::{Deserialize, Serialize};

use crate::detector::FlickerMap;
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::palette::PaletteColor;

const LCG_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const LCG_INCREMENT: u64 = 1_442_695_040_888_963_407;

/// Knuth's MMIX linear congruential generator.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        (self.state >> 32) as u32
    }

    /// Value in `0..bound` by modulo reduction.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0 && bound <= u32::MAX as usize + 1);
        (u64::from(self.next_u32()) % bound as u64) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionSpec {
    pub base_color: PaletteColor,
    pub flicker_color: PaletteColor,
    /// Target fraction of flickering pixels, in `[0, 1]`.
    pub fraction: f64,
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub seed: u64,
}

impl Default for InjectionSpec {
    fn default() -> Self {
        InjectionSpec {
            base_color: PaletteColor::Black,
            flicker_color: PaletteColor::White,
            fraction: 0.06,
            width: 100,
            height: 100,
            frame_count: 10,
            seed: 42,
        }
    }
}

impl InjectionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::invalid(
                "fraction",
                format!("{} is outside [0, 1]", self.fraction),
            ));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid(
                "size",
                format!("{}x{} has no pixels", self.width, self.height),
            ));
        }
        if self.pixel_count() > u32::MAX as usize {
            return Err(Error::invalid("size", "frame exceeds 2^32 pixels"));
        }
        if self.frame_count == 0 {
            return Err(Error::invalid(
                "frame count",
                "at least one frame is required",
            ));
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.width.saturating_mul(self.height)
    }

    /// `round(fraction · w · h)`, ties away from zero.
    pub fn flicker_count(&self) -> usize {
        (self.fraction * self.pixel_count() as f64).round() as usize
    }
}

/// Row-major pixel indices chosen for injection, in selection order.
pub fn select_locations(spec: &InjectionSpec) -> Result<Vec<usize>> {
    spec.validate()?;
    let n = spec.pixel_count();
    let k = spec.flicker_count().min(n);
    let mut rng = Lcg::new(spec.seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below(n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    Ok(pool)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSequence {
    pub sequence: FrameSequence,
    pub locations: Vec<usize>,
    /// One map per consecutive pair, marking exactly the injected pixels.
    pub ground_truth: Vec<FlickerMap>,
}

pub fn generate(spec: &InjectionSpec) -> Result<SyntheticSequence> {
    let locations = select_locations(spec)?;
    let (w, h) = (spec.width, spec.height);
    let base = Frame::filled(w, h, spec.base_color)?;
    let mut odd_pixels = base.pixels().to_vec();
    let mut mask = vec![false; w * h];
    for &i in &locations {
        odd_pixels[i] = spec.flicker_color.code();
        mask[i] = true;
    }
    let odd = Frame::new(w, h, odd_pixels)?;
    let frames = (0..spec.frame_count)
        .map(|i| {
            if i % 2 == 0 {
                base.clone()
            } else {
                odd.clone()
            }
        })
        .collect();
    let sequence = FrameSequence::new(frames)?;
    let ground_truth = (0..sequence.pair_count())
        .map(|i| FlickerMap::from_flags(w, h, mask.clone(), i))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticSequence {
        sequence,
        locations,
        ground_truth,
    })
}

/// Ground-truth document written next to generated frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: InjectionSpec,
    pub flagged_per_pair: usize,
    pub ratio: f64,
    /// `[x, y]` of every injected pixel, row-major order.
    pub locations: Vec<[usize; 2]>,
}

impl GroundTruth {
    pub fn new(spec: &InjectionSpec, synth: &SyntheticSequence) -> Self {
        let mut idx = synth.locations.clone();
        idx.sort_unstable();
        GroundTruth {
            spec: spec.clone(),
            flagged_per_pair: idx.len(),
            ratio: idx.len() as f64 / spec.pixel_count() as f64,
            locations: idx
                .into_iter()
                .map(|i| [i % spec.width, i / spec.width])
                .collect(),
        }
    }
}
