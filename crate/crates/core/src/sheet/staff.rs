//! Staff-line features: beam removal, comb filters, and per-notehead
//! local staff estimates.

use serde::Serialize;

use super::NoteheadDetection;
use crate::config::Config;
use crate::image::{binarize_otsu, convolve2d, open, GrayImage, Kernel, Raster, StructuringElement};
use crate::scalar::Scalar;

/// Zeroes every pixel that belongs to an Otsu-foreground vertical run
/// longer than `thickness_thresh`. Thin horizontal strokes (staff lines)
/// survive; thick ones (beams) go.
pub fn remove_beams<T: Scalar>(horiz: &GrayImage<T>, thickness_thresh: usize) -> GrayImage<T> {
    let Some(mask) = binarize_otsu(horiz) else {
        return horiz.clone();
    };
    let (h, w) = horiz.dims();
    let mut out = horiz.raster().clone();
    for c in 0..w {
        let mut r = 0;
        while r < h {
            if !mask.get(r, c) {
                r += 1;
                continue;
            }
            let start = r;
            while r < h && mask.get(r, c) {
                r += 1;
            }
            if r - start > thickness_thresh {
                for rr in start..r {
                    out.set(rr, c, T::zero());
                }
            }
        }
    }
    GrayImage::from_raster_clamped(out)
}

/// One-column comb: five bands of `impulse_height` rows at offsets
/// `0, s, 2s, 3s, 4s`, each tap `1 / (5 * impulse_height)`, anchored on
/// the middle band.
pub fn comb_filter<T: Scalar>(spacing: usize, impulse_height: usize) -> Kernel<T> {
    let height = 4 * spacing + impulse_height;
    let tap = T::of(1.0 / (5 * impulse_height) as f64);
    let mut weights = vec![T::zero(); height];
    for band in 0..5 {
        for i in 0..impulse_height {
            weights[band * spacing + i] = tap;
        }
    }
    Kernel::with_anchor(height, 1, weights, (2 * spacing, 0)).expect("anchor inside kernel")
}

/// Comb responses per spacing, each the size of the source image.
#[derive(Clone, Debug)]
pub struct StaffFeatureTensor<T> {
    pub responses: Vec<Raster<T>>,
    /// Ascending.
    pub spacings: Vec<usize>,
    pub impulse_height: usize,
}

impl<T: Scalar> StaffFeatureTensor<T> {
    pub fn dims(&self) -> (usize, usize) {
        self.responses.first().map_or((0, 0), |r| r.dims())
    }

    /// Response row `r` lies `(impulse_height - 1) / 2` below the center
    /// of the middle band it sampled.
    pub fn band_offset(&self) -> f64 {
        (self.impulse_height as f64 - 1.0) / 2.0
    }
}

/// Horizontal opening and beam removal; the image the combs run on.
pub fn staff_line_image<T: Scalar>(img: &GrayImage<T>, cfg: &Config) -> GrayImage<T> {
    let horiz = open(img, StructuringElement::Horizontal(cfg.horiz_se_width));
    remove_beams(&horiz, cfg.beam_thickness_thresh)
}

/// Convolves the staff-line image with every configured comb. Combs taller
/// than the image give an all-zero response.
pub fn comb_responses<T: Scalar>(lines: &GrayImage<T>, cfg: &Config) -> StaffFeatureTensor<T> {
    let spacings = cfg.comb_spacings();
    let (h, w) = lines.dims();
    let responses = spacings
        .iter()
        .map(|&s| {
            convolve2d(lines.raster(), &comb_filter(s, cfg.impulse_height))
                .unwrap_or_else(|_| Raster::filled(h, w, T::zero()))
        })
        .collect();
    StaffFeatureTensor {
        responses,
        spacings,
        impulse_height: cfg.impulse_height,
    }
}

pub fn staff_feature_tensor<T: Scalar>(img: &GrayImage<T>, cfg: &Config) -> StaffFeatureTensor<T> {
    comb_responses(&staff_line_image(img, cfg), cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalStaffEstimate {
    pub top_line_y: f64,
    pub middle_y: f64,
    pub spacing: f64,
    pub comb_index: usize,
    pub score: f64,
}

impl LocalStaffEstimate {
    pub fn bottom_line_y(&self) -> f64 {
        self.top_line_y + 4.0 * self.spacing
    }
}

/// Best `(row, comb)` after summing responses over a window around the
/// notehead. Rows span `±4·max(spacings)` and, for comb `k`, are further
/// limited to `±staff_reach·s_k` so a neighbouring staff cannot win.
/// Ties go to the smaller comb, then the smaller row.
pub fn estimate_local_staff<T: Scalar>(
    tensor: &StaffFeatureTensor<T>,
    notehead: &NoteheadDetection,
    cfg: &Config,
) -> LocalStaffEstimate {
    let (h, w) = tensor.dims();
    let (x, y) = notehead.center;
    let s_max = *tensor.spacings.last().expect("at least one comb") as f64;
    let clamp_row = |v: f64| v.round().clamp(0.0, h as f64 - 1.0) as usize;
    let xi = x.round().clamp(0.0, w as f64 - 1.0) as usize;
    let c0 = xi.saturating_sub(cfg.context_half_width);
    let c1 = (xi + cfg.context_half_width).min(w - 1);
    let (outer_lo, outer_hi) = (y - 4.0 * s_max, y + 4.0 * s_max);

    let mut best: Option<(f64, usize, usize)> = None;
    for (k, (resp, &s)) in tensor.responses.iter().zip(&tensor.spacings).enumerate() {
        let reach = cfg.staff_reach * s as f64;
        let r0 = clamp_row(outer_lo.max(y - reach));
        let r1 = clamp_row(outer_hi.min(y + reach));
        for r in r0..=r1 {
            let sum: f64 = resp.row(r)[c0..=c1].iter().map(|v| v.as_f64()).sum();
            if best.map_or(true, |(b, _, _)| sum > b) {
                best = Some((sum, k, r));
            }
        }
    }
    let (score, k, r) = best.expect("nonempty context");
    let spacing = tensor.spacings[k] as f64;
    let middle_y = r as f64 - tensor.band_offset();
    LocalStaffEstimate {
        top_line_y: middle_y - 2.0 * spacing,
        middle_y,
        spacing,
        comb_index: k,
        score,
    }
}
