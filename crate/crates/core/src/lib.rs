//! Flicker detection and reduction for image sequences.
//!
//! Pixels of consecutive frames are quantized onto an eight-color palette
//! and each color pair is scored with probabilities derived from a
//! column-stochastic color-relation table. Pixels scoring at or above a
//! threshold are flagged; flagged pairs are smoothed by inserting a frame of
//! channelwise means. A closed-form CRT phosphor model (amplitude
//! coefficient, visual angle, flicker rate) is included alongside.
//!
//! ```
//! use flicker::{detect_sequence, DetectorConfig, Frame, FrameSequence, PaletteColor};
//!
//! let a = Frame::filled(4, 4, PaletteColor::Black)?;
//! let b = Frame::filled(4, 4, PaletteColor::White)?;
//! let seq = FrameSequence::new(vec![a, b])?;
//! let det = detect_sequence(&seq, &DetectorConfig::default())?;
//! assert_eq!(det.report.aggregate_ratio, 1.0);
//! # Ok::<(), flicker::Error>(())
//! ```

pub mod detector;
pub mod error;
pub mod frame;
pub mod frame_io;
mod normal;
pub mod palette;
pub mod phosphor;
pub mod reducer;
pub mod report;
pub mod stochastic;
pub mod synth;

pub use detector::{
    compare_frames, detect_sequence, flicker_ratio, DetectorConfig, FlickerMap, FlickerReport,
    PairOrientation, PairReport, SequenceDetection, DEFAULT_THRESHOLD,
};
pub use error::{Error, ErrorKind, Result};
pub use frame::{Frame, FrameSequence};
pub use palette::{distance_matrix, quantize, Matrix8, PaletteColor, Rgb, PALETTE_SIZE};
pub use reducer::{
    insert_frames, mean_pixel, reconstruct_frame, reduce, reduction_report, replace_frames,
    ReconstructedFrame, ReconstructionFill, Reduction, ReductionMode, ReductionReport,
};
pub use stochastic::{normal_cdf, CdfMode, ProbabilitySource, StochasticTables};
