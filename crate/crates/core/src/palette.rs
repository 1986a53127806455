//! The eight-color computer palette and nearest-color quantization.
//!
//! Colors are indexed so that the index bits are `r g b` (red is the high
//! bit). That makes `Black = 0` and `White = 7`, and it also gives the row
//! and column order used by every 8×8 table in [`crate::stochastic`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of palette entries.
pub const PALETTE_SIZE: usize = 8;

/// 8×8 table indexed by `[row][column]` palette index.
pub type Matrix8 = [[f64; PALETTE_SIZE]; PALETTE_SIZE];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaletteColor {
    Black = 0,
    Blue = 1,
    Green = 2,
    Cyan = 3,
    Red = 4,
    Magenta = 5,
    Yellow = 6,
    White = 7,
}

impl PaletteColor {
    pub const ALL: [PaletteColor; PALETTE_SIZE] = [
        PaletteColor::Black,
        PaletteColor::Blue,
        PaletteColor::Green,
        PaletteColor::Cyan,
        PaletteColor::Red,
        PaletteColor::Magenta,
        PaletteColor::Yellow,
        PaletteColor::White,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            PaletteColor::Black => "Black",
            PaletteColor::Blue => "Blue",
            PaletteColor::Green => "Green",
            PaletteColor::Cyan => "Cyan",
            PaletteColor::Red => "Red",
            PaletteColor::Magenta => "Magenta",
            PaletteColor::Yellow => "Yellow",
            PaletteColor::White => "White",
        }
    }

    /// Canonical unit-cube code, e.g. `Yellow` is `[1 1 0]`.
    pub fn code(self) -> Rgb {
        let i = self.index();
        let bit = |shift: usize| ((i >> shift) & 1) as f64;
        Rgb {
            r: bit(2),
            g: bit(1),
            b: bit(0),
        }
    }
}

impl fmt::Display for PaletteColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PaletteColor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        // single-letter symbols follow the usual plotting shorthand (k = black)
        let color = match lower.as_str() {
            "black" | "k" => PaletteColor::Black,
            "blue" | "b" => PaletteColor::Blue,
            "green" | "g" => PaletteColor::Green,
            "cyan" | "c" => PaletteColor::Cyan,
            "red" | "r" => PaletteColor::Red,
            "magenta" | "m" => PaletteColor::Magenta,
            "yellow" | "y" => PaletteColor::Yellow,
            "white" | "w" => PaletteColor::White,
            _ => {
                return Err(Error::invalid(
                    "color",
                    format!("unknown palette color {s:?}"),
                ))
            }
        };
        Ok(color)
    }
}

/// An RGB pixel with each channel in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Rgb {
    pub const BLACK: Rgb = Rgb {
        r: 0.0,
        g: 0.0,
        b: 0.0,
    };

    /// Checked constructor; every channel must lie in `[0, 1]`.
    pub fn new(r: f64, g: f64, b: f64) -> Result<Self> {
        for (name, v) in [
            ("red channel", r),
            ("green channel", g),
            ("blue channel", b),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} is outside [0, 1]")));
            }
        }
        Ok(Rgb { r, g, b })
    }

    /// Normalizes 8-bit channels by `v / 255`.
    pub fn from_u8(rgb: [u8; 3]) -> Self {
        Rgb {
            r: f64::from(rgb[0]) / 255.0,
            g: f64::from(rgb[1]) / 255.0,
            b: f64::from(rgb[2]) / 255.0,
        }
    }

    /// Rounds `channel * 255` to the nearest integer, ties away from zero.
    pub fn to_u8(self) -> [u8; 3] {
        [
            channel_to_u8(self.r),
            channel_to_u8(self.g),
            channel_to_u8(self.b),
        ]
    }

    #[inline]
    pub fn channels(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn is_valid(self) -> bool {
        self.channels().iter().all(|c| (0.0..=1.0).contains(c))
    }

    #[inline]
    pub fn distance_squared(self, other: Rgb) -> f64 {
        let dr = self.r - other.r;
        let dg = self.g - other.g;
        let db = self.b - other.b;
        dr * dr + dg * dg + db * db
    }
}

#[inline]
fn channel_to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

impl From<PaletteColor> for Rgb {
    fn from(c: PaletteColor) -> Self {
        c.code()
    }
}

/// Nearest palette color by Euclidean RGB distance, ties to the lowest index.
pub fn quantize(p: Rgb) -> PaletteColor {
    let mut best = PaletteColor::Black;
    let mut best_dist = f64::INFINITY;
    for c in PaletteColor::ALL {
        let d = p.distance_squared(c.code());
        if d < best_dist {
            best = c;
            best_dist = d;
        }
    }
    best
}

/// Pairwise color relation table: zero diagonal, `(i + j) / 2` elsewhere.
///
/// Entries are exact halves, so comparisons against the published table
/// need no tolerance.
pub fn distance_matrix() -> Matrix8 {
    let mut d = [[0.0; PALETTE_SIZE]; PALETTE_SIZE];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = (i + j) as f64 / 2.0;
            }
        }
    }
    d
}
