//! Retrieval of MIDI passages from photos of printed piano sheet music.
//!
//! Both modalities are reduced to a bootleg score: a 62-row binary matrix
//! with one row per staff line or space position and three columns per
//! note event. A photo's bootleg score is aligned against a MIDI file's
//! with subsequence DTW, and the matched columns are mapped back to time.

pub mod align;
pub mod config;
pub mod eval;
pub mod image;
pub mod midi;
pub mod overlay;
pub mod pipeline;
pub mod scalar;
pub mod score;
pub mod sheet;
pub mod synth;
pub mod timing;

use thiserror::Error;

/// Single-precision grayscale image, the pipeline's default sample type.
pub type Gray32 = image::GrayImage<f32>;
/// Double-precision grayscale image.
pub type Gray64 = image::GrayImage<f64>;
/// Single-precision raster.
pub type Raster32 = image::Raster<f32>;
/// Double-precision raster.
pub type Raster64 = image::Raster<f64>;
pub type Analysis32 = sheet::SheetAnalysis<f32>;
pub type Analysis64 = sheet::SheetAnalysis<f64>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Midi(#[from] midi::MidiError),
    #[error(transparent)]
    Score(#[from] score::ScoreError),
    #[error(transparent)]
    Format(#[from] score::FormatError),
    #[error(transparent)]
    Sheet(#[from] sheet::SheetError),
    #[error(transparent)]
    Align(#[from] align::AlignError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}
