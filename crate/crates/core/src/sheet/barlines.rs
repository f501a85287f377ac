//! Bar-line detection and grouping into lines of music.

use serde::Serialize;

use super::{BBox, SheetError};
use crate::config::Config;
use crate::image::{binarize_otsu, connected_components, open, otsu_threshold_values, Connectivity, GrayImage, Region, StructuringElement};
use crate::scalar::Scalar;

/// One system: a horizontal band delimited by its clustered bar lines.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MusicLine {
    /// Inclusive `(top, bottom)` rows.
    pub y_range: (usize, usize),
    /// Left to right.
    pub barlines: Vec<BBox>,
}

impl MusicLine {
    pub fn contains_y(&self, y: f64) -> bool {
        y >= self.y_range.0 as f64 && y <= self.y_range.1 as f64
    }

    pub fn mid_y(&self) -> f64 {
        (self.y_range.0 + self.y_range.1) as f64 / 2.0
    }
}

/// Heights within this ratio of each other are all taken as bar lines.
const UNIFORM_HEIGHT_RATIO: f64 = 1.1;

/// Splits tall thin regions into stems and bar lines by an Otsu threshold
/// on height; the taller class is kept.
pub fn select_barlines(regions: &[Region]) -> Vec<Region> {
    let heights: Vec<usize> = regions.iter().map(Region::height).collect();
    let (Some(&lo), Some(&hi)) = (heights.iter().min(), heights.iter().max()) else {
        return Vec::new();
    };
    if hi as f64 <= lo as f64 * UNIFORM_HEIGHT_RATIO {
        return regions.to_vec();
    }
    let t = otsu_threshold_values(&heights).expect("at least two distinct heights");
    regions.iter().filter(|r| r.height() >= t).cloned().collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Clusters bar lines whose row intervals overlap (transitively).
pub fn cluster_barlines(bars: &[BBox]) -> Vec<MusicLine> {
    let n = bars.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if bars[i].y0 <= bars[j].y1 && bars[j].y0 <= bars[i].y1 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<BBox>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if root_slot[root] == usize::MAX {
            root_slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[root]].push(bars[i]);
    }
    let mut lines: Vec<MusicLine> = groups
        .into_iter()
        .map(|mut g| {
            g.sort_by_key(|b| (b.x0, b.y0));
            let top = g.iter().map(|b| b.y0).min().expect("nonempty group");
            let bottom = g.iter().map(|b| b.y1).max().expect("nonempty group");
            MusicLine {
                y_range: (top, bottom),
                barlines: g,
            }
        })
        .collect();
    lines.sort_by_key(|l| l.y_range);
    lines
}

/// Vertical opening, Otsu, components, width gate, height split, then
/// overlap clustering. Lines are ordered top to bottom.
pub fn detect_barlines<T: Scalar>(img: &GrayImage<T>, cfg: &Config) -> Result<Vec<MusicLine>, SheetError> {
    let vert = open(img, StructuringElement::Vertical(cfg.vert_se_height));
    let binary = binarize_otsu(&vert).ok_or(SheetError::NoMusicLines)?;
    let thin: Vec<Region> = connected_components(&binary, Connectivity::Eight)
        .into_iter()
        .filter(|r| r.width() <= cfg.barline_max_width)
        .collect();
    let bars: Vec<BBox> = select_barlines(&thin).iter().map(BBox::of_region).collect();
    if bars.is_empty() {
        return Err(SheetError::NoMusicLines);
    }
    Ok(cluster_barlines(&bars))
}
