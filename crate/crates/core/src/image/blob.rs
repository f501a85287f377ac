//! Multi-threshold blob detector.
//!
//! The image is binarized at several evenly spaced levels between its
//! minimum and maximum intensity. Connected components of acceptable area
//! at each level are matched across levels by center distance, and a blob
//! is reported when it persists over at least two levels.

use serde::{Deserialize, Serialize};

use super::{label_components, Connectivity, GrayImage};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlobParams {
    pub min_area: f64,
    pub max_area: f64,
    pub num_thresholds: usize,
    pub min_dist_between_blobs: f64,
}

impl Default for BlobParams {
    fn default() -> Self {
        Self {
            min_area: 50.0,
            max_area: 1000.0,
            num_thresholds: 10,
            min_dist_between_blobs: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    /// Column.
    pub x: f64,
    /// Row.
    pub y: f64,
    /// Diameter of the equal-area circle, averaged over levels.
    pub diameter: f64,
}

/// Minimum number of levels a blob must appear at.
const MIN_REPEATABILITY: usize = 2;

struct Track {
    sum_x: f64,
    sum_y: f64,
    sum_d: f64,
    hits: usize,
    last_level: usize,
}

impl Track {
    fn center(&self) -> (f64, f64) {
        (self.sum_x / self.hits as f64, self.sum_y / self.hits as f64)
    }
}

/// Bright (foreground-high) blobs, ordered by `(y, x)`.
pub fn simple_blob_detect<T: Scalar>(img: &GrayImage<T>, params: &BlobParams) -> Vec<Keypoint> {
    let (lo, hi) = img
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v.as_f64()), hi.max(v.as_f64()))
        });
    if img.data().is_empty() || hi <= lo || params.num_thresholds == 0 {
        return Vec::new();
    }

    let n = params.num_thresholds;
    let mut tracks: Vec<Track> = Vec::new();
    let min_dist2 = params.min_dist_between_blobs * params.min_dist_between_blobs;
    for level in 0..n {
        let t = T::of(lo + (hi - lo) * (level as f64 + 1.0) / (n as f64 + 1.0));
        let binary = img.raster().map(|v| v >= t);
        let labeling = label_components(&binary, Connectivity::Eight);
        for region in &labeling.regions {
            let area = region.pixel_count as f64;
            if area < params.min_area || area > params.max_area {
                continue;
            }
            let (cy, cx) = region.centroid;
            let diameter = 2.0 * (area / std::f64::consts::PI).sqrt();
            let nearest = tracks
                .iter_mut()
                .filter(|tr| tr.last_level != level)
                .map(|tr| {
                    let (tx, ty) = tr.center();
                    ((tx - cx).powi(2) + (ty - cy).powi(2), tr)
                })
                .filter(|(d2, _)| *d2 < min_dist2)
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match nearest {
                Some((_, tr)) => {
                    tr.sum_x += cx;
                    tr.sum_y += cy;
                    tr.sum_d += diameter;
                    tr.hits += 1;
                    tr.last_level = level;
                }
                None => tracks.push(Track {
                    sum_x: cx,
                    sum_y: cy,
                    sum_d: diameter,
                    hits: 1,
                    last_level: level,
                }),
            }
        }
    }

    let mut out: Vec<Keypoint> = tracks
        .into_iter()
        .filter(|tr| tr.hits >= MIN_REPEATABILITY)
        .map(|tr| {
            let (x, y) = tr.center();
            Keypoint {
                x,
                y,
                diameter: tr.sum_d / tr.hits as f64,
            }
        })
        .collect();
    out.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    out
}
