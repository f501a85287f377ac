//! Sheet-music photo to query bootleg score.
//!
//! Stages, in order: preprocessing, bar-line detection, notehead
//! detection, staff-line features, then projection of every notehead onto
//! the shared staff-row grid. A page without music lines is rejected
//! before any notehead work.

mod barlines;
mod noteheads;
mod project;
mod staff;

pub use barlines::{cluster_barlines, detect_barlines, select_barlines, MusicLine};
pub use noteheads::{
    blob_params, classify, detect_noteheads, mean_crop, measure_template, Candidate, NoteheadDetection,
    NoteheadTemplate,
};
pub use project::{group_simultaneous, label_notehead, query_bootleg, Discard, LabeledNotehead, QueryEvent};
pub use staff::{
    comb_filter, comb_responses, estimate_local_staff, remove_beams, staff_feature_tensor, staff_line_image,
    LocalStaffEstimate, StaffFeatureTensor,
};

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::config::Config;
use crate::image::{background_subtract, resize_max_dim, to_grayscale_u8, GrayImage, ImageError, Region};
use crate::scalar::Scalar;
use crate::score::BootlegScore;
use crate::timing::StageTimings;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SheetError {
    #[error("template adaptation failed: no notehead-like blobs found")]
    TemplateAdaptationFailed,
    #[error("no music lines found")]
    NoMusicLines,
    #[error("no notes detected")]
    NoNotes,
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Inclusive pixel rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl BBox {
    pub fn of_region(r: &Region) -> Self {
        Self {
            x0: r.col_min,
            y0: r.row_min,
            x1: r.col_max,
            y1: r.row_max,
        }
    }

    /// `width x height` box centered on `(cx, cy)`, clipped to the image.
    pub fn centered(cx: f64, cy: f64, width: usize, height: usize, img_w: usize, img_h: usize) -> Self {
        let clip = |v: f64, hi: usize| v.round().clamp(0.0, hi as f64 - 1.0) as usize;
        let (hw, hh) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
        Self {
            x0: clip(cx - hw, img_w),
            y0: clip(cy - hh, img_h),
            x1: clip(cx + hw, img_w),
            y1: clip(cy + hh, img_h),
        }
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 as f64 && x <= self.x1 as f64 && y >= self.y0 as f64 && y <= self.y1 as f64
    }
}

/// Decodes PNG or JPEG bytes to grayscale.
pub fn decode_gray<T: Scalar>(bytes: &[u8]) -> Result<GrayImage<T>, SheetError> {
    let rgb = ::image::load_from_memory(bytes)
        .map_err(|e| SheetError::Decode(e.to_string()))?
        .to_rgb8();
    let (w, h) = rgb.dimensions();
    Ok(to_grayscale_u8(h as usize, w as usize, rgb.as_raw())?)
}

pub fn load_gray<T: Scalar>(path: &Path) -> Result<GrayImage<T>, SheetError> {
    let bytes = std::fs::read(path).map_err(|e| SheetError::Decode(format!("{}: {e}", path.display())))?;
    decode_gray(&bytes)
}

/// Resize so the longer side is at most `maxDim`, then subtract the
/// blurred background. Ink comes out high.
pub fn preprocess<T: Scalar>(gray: &GrayImage<T>, cfg: &Config) -> GrayImage<T> {
    background_subtract(&resize_max_dim(gray, cfg.max_dim), cfg.blur_half_width)
}

/// Everything the pipeline computed for one image, kept for overlays and
/// diagnostics even when a stage fails.
#[derive(Clone, Debug)]
pub struct SheetAnalysis<T> {
    pub image: GrayImage<T>,
    pub template: Option<NoteheadTemplate<T>>,
    pub noteheads: Vec<NoteheadDetection>,
    /// Horizontally opened image after beam removal.
    pub staff_lines: Option<GrayImage<T>>,
    pub music_lines: Vec<MusicLine>,
    /// One per notehead, same order.
    pub estimates: Vec<LocalStaffEstimate>,
    pub labeled: Vec<LabeledNotehead>,
    pub discarded: Vec<(usize, Discard)>,
    pub events: Vec<QueryEvent>,
    pub outcome: Result<BootlegScore, SheetError>,
    pub timings: StageTimings,
}

/// Stage names used in [`SheetAnalysis::timings`].
pub mod stage {
    pub const PREPROCESS: &str = "preprocess";
    pub const NOTEHEADS: &str = "noteheads";
    pub const STAFF_FEATURES: &str = "staffFeatures";
    pub const BARLINES: &str = "barlines";
    pub const PROJECTION: &str = "projection";
}

/// Runs every stage on a grayscale photo. Stops at the first failing
/// stage; what was computed before it stays in the result.
pub fn analyze<T: Scalar>(gray: &GrayImage<T>, cfg: &Config) -> SheetAnalysis<T> {
    let mut timings = StageTimings::new();
    let image = timings.time(stage::PREPROCESS, || preprocess(gray, cfg));
    let mut a = SheetAnalysis {
        image,
        template: None,
        noteheads: Vec::new(),
        staff_lines: None,
        music_lines: Vec::new(),
        estimates: Vec::new(),
        labeled: Vec::new(),
        discarded: Vec::new(),
        events: Vec::new(),
        outcome: Err(SheetError::NoNotes),
        timings: StageTimings::new(),
    };
    a.outcome = run_stages(&mut a, cfg, &mut timings);
    a.timings = timings;
    a
}

fn run_stages<T: Scalar>(
    a: &mut SheetAnalysis<T>,
    cfg: &Config,
    timings: &mut StageTimings,
) -> Result<BootlegScore, SheetError> {
    a.music_lines = timings.time(stage::BARLINES, || detect_barlines(&a.image, cfg))?;

    let (noteheads, template) = timings.time(stage::NOTEHEADS, || detect_noteheads(&a.image, cfg))?;
    a.noteheads = noteheads;
    a.template = Some(template);

    let tensor = timings.time(stage::STAFF_FEATURES, || {
        let lines = staff_line_image(&a.image, cfg);
        let tensor = comb_responses(&lines, cfg);
        a.staff_lines = Some(lines);
        tensor
    });

    timings.time(stage::PROJECTION, || {
        a.estimates = a.noteheads.iter().map(|n| estimate_local_staff(&tensor, n, cfg)).collect();
        for (i, (n, e)) in a.noteheads.iter().zip(&a.estimates).enumerate() {
            match label_notehead(n, e, &a.music_lines) {
                Ok(l) => a.labeled.push(l),
                Err(d) => a.discarded.push((i, d)),
            }
        }
        a.events = group_simultaneous(&a.labeled, cfg.simultaneity_tol);
        query_bootleg(&a.events)
    })
}

/// Query bootleg score of a grayscale photo.
pub fn image_bootleg<T: Scalar>(gray: &GrayImage<T>, cfg: &Config) -> Result<BootlegScore, SheetError> {
    analyze(gray, cfg).outcome
}
