//! Debug drawings of intermediate pipeline results, one PNG per layer.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ::image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::image::{resize_max_dim, GrayImage};
use crate::scalar::Scalar;
use crate::sheet::{BBox, SheetAnalysis};

#[derive(Debug, Error)]
pub enum OverlayError {
    #[error("no overlay layers requested")]
    NoLayers,
    #[error("unknown overlay layer {0:?}")]
    UnknownLayer(String),
    #[error("layer {0} has nothing to draw: the pipeline stopped before it")]
    Unavailable(&'static str),
    #[error("cannot write overlay {path}: {message}")]
    Write { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    NoteheadBoxes,
    ChordCenters,
    BeamRemoval,
    BarlineBoxes,
    MusicLines,
    StaffDots,
}

impl Layer {
    pub const ALL: [Layer; 6] = [
        Layer::NoteheadBoxes,
        Layer::ChordCenters,
        Layer::BeamRemoval,
        Layer::BarlineBoxes,
        Layer::MusicLines,
        Layer::StaffDots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Layer::NoteheadBoxes => "notehead-boxes",
            Layer::ChordCenters => "chord-centers",
            Layer::BeamRemoval => "beam-removal",
            Layer::BarlineBoxes => "barline-boxes",
            Layer::MusicLines => "music-lines",
            Layer::StaffDots => "staff-dots",
        }
    }
}

impl FromStr for Layer {
    type Err = OverlayError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Layer::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| OverlayError::UnknownLayer(s.to_string()))
    }
}

/// Layers to draw; never empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlaySpec {
    layers: Vec<Layer>,
}

impl OverlaySpec {
    pub fn new(mut layers: Vec<Layer>) -> Result<Self, OverlayError> {
        layers.sort();
        layers.dedup();
        if layers.is_empty() {
            return Err(OverlayError::NoLayers);
        }
        Ok(Self { layers })
    }

    pub fn all() -> Self {
        Self {
            layers: Layer::ALL.to_vec(),
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }
}

const RED: Rgb<u8> = Rgb([220, 30, 30]);
const BLUE: Rgb<u8> = Rgb([30, 60, 220]);
const GREEN: Rgb<u8> = Rgb([20, 170, 60]);
const ORANGE: Rgb<u8> = Rgb([240, 140, 0]);

fn gray_to_rgb<T: Scalar>(img: &GrayImage<T>) -> RgbImage {
    let (h, w) = img.dims();
    RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let v = (img.get(y as usize, x as usize).as_f64() * 255.0).round().clamp(0.0, 255.0) as u8;
        Rgb([v, v, v])
    })
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

fn draw_box(img: &mut RgbImage, b: &BBox, c: Rgb<u8>) {
    let (x0, y0, x1, y1) = (b.x0 as i64, b.y0 as i64, b.x1 as i64, b.y1 as i64);
    for x in x0..=x1 {
        put(img, x, y0, c);
        put(img, x, y1, c);
    }
    for y in y0..=y1 {
        put(img, x0, y, c);
        put(img, x1, y, c);
    }
}

fn draw_dot(img: &mut RgbImage, x: f64, y: f64, r: i64, c: Rgb<u8>) {
    let (cx, cy) = (x.round() as i64, y.round() as i64);
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                put(img, cx + dx, cy + dy, c);
            }
        }
    }
}

fn tint_rows(img: &mut RgbImage, y0: usize, y1: usize, c: Rgb<u8>) {
    for y in y0..=y1.min(img.height() as usize - 1) {
        for x in 0..img.width() {
            let p = img.get_pixel_mut(x, y as u32);
            for k in 0..3 {
                p.0[k] = ((p.0[k] as u16 * 2 + c.0[k] as u16) / 3) as u8;
            }
        }
    }
}

/// Draws one layer over `base`, the photo resized to pipeline coordinates.
pub fn render_layer<T: Scalar>(
    base: &GrayImage<T>,
    analysis: &SheetAnalysis<T>,
    layer: Layer,
) -> Result<RgbImage, OverlayError> {
    let mut img = gray_to_rgb(base);
    match layer {
        Layer::NoteheadBoxes => {
            for n in &analysis.noteheads {
                draw_box(&mut img, &n.bbox, if n.from_chord_split { ORANGE } else { RED });
            }
        }
        Layer::ChordCenters => {
            for n in analysis.noteheads.iter().filter(|n| n.from_chord_split) {
                draw_dot(&mut img, n.center.0, n.center.1, 2, RED);
            }
        }
        Layer::BeamRemoval => {
            let lines = analysis
                .staff_lines
                .as_ref()
                .ok_or(OverlayError::Unavailable(layer.name()))?;
            img = gray_to_rgb(&lines.inverted());
        }
        Layer::BarlineBoxes => {
            for line in &analysis.music_lines {
                for b in &line.barlines {
                    draw_box(&mut img, b, BLUE);
                }
            }
        }
        Layer::MusicLines => {
            for (i, line) in analysis.music_lines.iter().enumerate() {
                let c = if i % 2 == 0 { GREEN } else { ORANGE };
                tint_rows(&mut img, line.y_range.0, line.y_range.1, c);
            }
        }
        Layer::StaffDots => {
            for (n, e) in analysis.noteheads.iter().zip(&analysis.estimates) {
                draw_dot(&mut img, n.center.0, e.top_line_y, 2, RED);
                draw_dot(&mut img, n.center.0, e.top_line_y + 4.0 * e.spacing, 2, BLUE);
            }
        }
    }
    Ok(img)
}

/// Writes `<dir>/<layer>.png` for every layer in `spec`. Layers whose
/// stage never ran are skipped and reported in the second list.
pub fn write_overlays<T: Scalar>(
    dir: &Path,
    gray: &GrayImage<T>,
    analysis: &SheetAnalysis<T>,
    cfg: &Config,
    spec: &OverlaySpec,
) -> Result<(Vec<PathBuf>, Vec<OverlayError>), OverlayError> {
    let base = resize_max_dim(gray, cfg.max_dim);
    let write_err = |path: &Path, e: &dyn std::fmt::Display| OverlayError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| write_err(dir, &e))?;
    let mut written = Vec::new();
    let mut skipped = Vec::new();
    for &layer in spec.layers() {
        match render_layer(&base, analysis, layer) {
            Ok(img) => {
                let path = dir.join(format!("{}.png", layer.name()));
                img.save(&path).map_err(|e| write_err(&path, &e))?;
                written.push(path);
            }
            Err(e) => skipped.push(e),
        }
    }
    Ok((written, skipped))
}
