//! Filled-notehead detection with a template estimated from the image.

use serde::Serialize;

use super::{BBox, SheetError};
use crate::config::Config;
use crate::image::{
    binarize_otsu, kmeans2d, label_components, open, simple_blob_detect, BlobParams, Connectivity,
    GrayImage, Keypoint, Raster, Region, StructuringElement,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NoteheadDetection {
    pub bbox: BBox,
    /// `(x, y)` in pixels.
    pub center: (f64, f64),
    pub from_chord_split: bool,
}

/// Appearance of a typical notehead in this image.
#[derive(Clone, Debug, PartialEq)]
pub struct NoteheadTemplate<T> {
    pub height: usize,
    pub width: usize,
    /// Foreground pixel count of the binarized patch.
    pub area: usize,
    /// Mean of the crops around the blob keypoints.
    pub patch: Raster<T>,
}

impl<T> NoteheadTemplate<T> {
    pub fn aspect(&self) -> f64 {
        self.height as f64 / self.width as f64
    }
}

/// Average of `crop x crop` windows centered on each keypoint, with edge
/// replication at the borders.
pub fn mean_crop<T: Scalar>(img: &GrayImage<T>, keypoints: &[Keypoint], crop: usize) -> Raster<T> {
    let half = (crop / 2) as isize;
    let mut acc = vec![0.0f64; crop * crop];
    for kp in keypoints {
        let (cy, cx) = (kp.y.round() as isize, kp.x.round() as isize);
        for i in 0..crop {
            for j in 0..crop {
                let v = img.get_clamped(cy - half + i as isize, cx - half + j as isize);
                acc[i * crop + j] += v.as_f64();
            }
        }
    }
    let n = keypoints.len().max(1) as f64;
    Raster::new(crop, crop, acc.into_iter().map(|v| T::of(v / n)).collect()).expect("square crop")
}

/// Measures the template from the Otsu foreground component at (or nearest
/// to) the patch center.
pub fn measure_template<T: Scalar>(patch: Raster<T>) -> Result<NoteheadTemplate<T>, SheetError> {
    let gray = GrayImage::from_raster_clamped(patch.clone());
    let binary = binarize_otsu(&gray).ok_or(SheetError::TemplateAdaptationFailed)?;
    let labeling = label_components(&binary, Connectivity::Eight);
    let c = patch.height() / 2;
    let centre_label = labeling.labels.get(c, c);
    let region = labeling
        .regions
        .iter()
        .find(|r| r.label == centre_label)
        .or_else(|| {
            labeling.regions.iter().min_by(|a, b| {
                let d = |r: &Region| (r.centroid.0 - c as f64).powi(2) + (r.centroid.1 - c as f64).powi(2);
                d(a).total_cmp(&d(b))
            })
        })
        .ok_or(SheetError::TemplateAdaptationFailed)?;
    Ok(NoteheadTemplate {
        height: region.height(),
        width: region.width(),
        area: region.pixel_count,
        patch,
    })
}

/// How a connected component of the opened image is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Candidate {
    Single,
    Chord(usize),
    Reject,
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

/// Size gates relative to the template. Singles must also keep their bbox
/// within twice the template's ink area.
pub fn classify<T>(region: &Region, t: &NoteheadTemplate<T>, cfg: &Config) -> Candidate {
    let (h, w, area) = (region.height() as f64, region.width() as f64, region.pixel_count as f64);
    let (th, tw, ta) = (t.height as f64, t.width as f64, t.area as f64);
    let aspect = h / w;
    if area >= cfg.chord_area_min * ta {
        let ok = within(w, cfg.cand_width_min * tw, cfg.chord_max_width * tw) && h >= cfg.cand_height_min * th;
        return if ok {
            Candidate::Chord(((area / ta).round() as usize).max(2))
        } else {
            Candidate::Reject
        };
    }
    let single = within(h, cfg.cand_height_min * th, cfg.cand_height_max * th)
        && within(w, cfg.cand_width_min * tw, cfg.cand_width_max * tw)
        && within(aspect, cfg.cand_aspect_min * t.aspect(), cfg.cand_aspect_max * t.aspect())
        && within(area, cfg.cand_area_min * ta, cfg.cand_area_max * ta)
        && (region.bbox_area() as f64) <= 2.0 * ta;
    if single {
        Candidate::Single
    } else {
        Candidate::Reject
    }
}

pub fn blob_params(cfg: &Config) -> BlobParams {
    BlobParams {
        min_area: cfg.blob_min_area as f64,
        max_area: cfg.blob_max_area as f64,
        num_thresholds: cfg.blob_num_thresholds,
        min_dist_between_blobs: cfg.blob_min_dist,
    }
}

/// Opening with a disc, template estimation from blob keypoints, then
/// size-gated components of the Otsu-binarized opening. Chord blocks are
/// split with k-means into template-sized boxes.
pub fn detect_noteheads<T: Scalar>(
    img: &GrayImage<T>,
    cfg: &Config,
) -> Result<(Vec<NoteheadDetection>, NoteheadTemplate<T>), SheetError> {
    let opened = open(img, StructuringElement::Disc(cfg.notehead_se_radius));
    let keypoints = simple_blob_detect(&opened, &blob_params(cfg));
    if keypoints.is_empty() {
        return Err(SheetError::TemplateAdaptationFailed);
    }
    let template = measure_template(mean_crop(&opened, &keypoints, cfg.crop_size))?;
    let binary = binarize_otsu(&opened).ok_or(SheetError::TemplateAdaptationFailed)?;
    let labeling = label_components(&binary, Connectivity::Eight);
    let (h, w) = img.dims();

    let mut out = Vec::new();
    for region in &labeling.regions {
        match classify(region, &template, cfg) {
            Candidate::Reject => {}
            Candidate::Single => out.push(NoteheadDetection {
                bbox: BBox {
                    x0: region.col_min,
                    y0: region.row_min,
                    x1: region.col_max,
                    y1: region.row_max,
                },
                center: (region.centroid.1, region.centroid.0),
                from_chord_split: false,
            }),
            Candidate::Chord(k) => {
                let points: Vec<(f64, f64)> = labeling
                    .pixels(region)
                    .into_iter()
                    .map(|(r, c)| (c as f64, r as f64))
                    .collect();
                let k = k.min(points.len());
                for (cx, cy) in kmeans2d(&points, k)? {
                    out.push(NoteheadDetection {
                        bbox: BBox::centered(cx, cy, template.width, template.height, w, h),
                        center: (cx, cy),
                        from_chord_split: true,
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| a.center.1.total_cmp(&b.center.1).then(a.center.0.total_cmp(&b.center.0)));
    Ok((out, template))
}
