use crate::error::{Error, Result};
use crate::palette::Rgb;

/// Row-major grid of unit-interval RGB pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(
                "frame size",
                format!("{width}x{height} has no pixels"),
            ));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("frame size", format!("{width}x{height} overflows")))?;
        if pixels.len() != expected {
            return Err(Error::invalid(
                "frame pixels",
                format!(
                    "{} pixels supplied for a {width}x{height} frame",
                    pixels.len()
                ),
            ));
        }
        if let Some(i) = pixels.iter().position(|p| !p.is_valid()) {
            return Err(Error::invalid(
                "frame pixels",
                format!("pixel {i} ({:?}) has a channel outside [0, 1]", pixels[i]),
            ));
        }
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, color: impl Into<Rgb>) -> Result<Self> {
        let color = color.into();
        Frame::new(width, height, vec![color; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Rgb,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Frame::new(width, height, pixels)
    }

    /// Builds a frame from packed 8-bit RGB triples.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(3) {
            return Err(Error::invalid(
                "frame bytes",
                "length is not a multiple of 3",
            ));
        }
        let pixels = bytes
            .chunks_exact(3)
            .map(|c| Rgb::from_u8([c[0], c[1], c[2]]))
            .collect();
        Frame::new(width, height, pixels)
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.to_u8()).collect()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<Rgb> {
        (x < self.width && y < self.height).then(|| self.pixels[y * self.width + x])
    }

    pub fn same_size(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_size(&self, other: &Frame) -> Result<()> {
        if self.same_size(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            })
        }
    }

    /// Only for pixels already known to be valid.
    pub(crate) fn with_pixels(&self, pixels: Vec<Rgb>) -> Frame {
        debug_assert_eq!(pixels.len(), self.pixels.len());
        Frame {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Ordered frames of uniform size, with optional frame-rate metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    frames: Vec<Frame>,
    fps: Option<f64>,
}

impl FrameSequence {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let first = frames.first().ok_or(Error::SequenceTooShort {
            found: 0,
            required: 1,
        })?;
        for f in &frames[1..] {
            first.check_same_size(f)?;
        }
        Ok(FrameSequence { frames, fps: None })
    }

    pub fn with_fps(mut self, fps: f64) -> Result<Self> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::invalid(
                "frame rate",
                format!("{fps} is not a positive rate"),
            ));
        }
        self.fps = Some(fps);
        Ok(self)
    }

    pub fn fps(&self) -> Option<f64> {
        self.fps
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    /// Consecutive `(F[a], F[a+1])` pairs.
    pub fn pairs(&self) -> impl ExactSizeIterator<Item = (&Frame, &Frame)> + '_ {
        self.frames.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn pair_count(&self) -> usize {
        self.frames.len().saturating_sub(1)
    }
}
