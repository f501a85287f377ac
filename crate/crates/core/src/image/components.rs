//! Connected component labeling (two-pass, union-find).

use serde::{Deserialize, Serialize};

use super::{BinaryImage, Raster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Region {
    /// Label value of this region in the accompanying [`Labeling`].
    pub label: u32,
    pub pixel_count: usize,
    pub row_min: usize,
    pub col_min: usize,
    pub row_max: usize,
    pub col_max: usize,
    /// (row, col) mean of member pixels.
    pub centroid: (f64, f64),
}

impl Region {
    pub fn height(&self) -> usize {
        self.row_max - self.row_min + 1
    }

    pub fn width(&self) -> usize {
        self.col_max - self.col_min + 1
    }

    pub fn bbox_area(&self) -> usize {
        self.height() * self.width()
    }
}

/// Label image (0 = background) plus the regions, ordered by
/// `(row_min, col_min)` then first pixel in raster order. Region `i`
/// carries label `i + 1`.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub labels: Raster<u32>,
    pub regions: Vec<Region>,
}

impl Labeling {
    /// Member pixel coordinates `(row, col)` of `region`.
    pub fn pixels(&self, region: &Region) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(region.pixel_count);
        for r in region.row_min..=region.row_max {
            for c in region.col_min..=region.col_max {
                if self.labels.get(r, c) == region.label {
                    out.push((r, c));
                }
            }
        }
        out
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

pub fn label_components(img: &BinaryImage, connectivity: Connectivity) -> Labeling {
    let (h, w) = img.dims();
    let mut provisional = vec![0u32; h * w];
    let mut parent: Vec<u32> = vec![0];
    let fg = img.data();

    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if !fg[i] {
                continue;
            }
            let mut neighbors = [0u32; 4];
            let mut n = 0;
            let mut push = |l: u32| {
                if l != 0 {
                    neighbors[n] = l;
                    n += 1;
                }
            };
            if c > 0 {
                push(provisional[i - 1]);
            }
            if r > 0 {
                push(provisional[i - w]);
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        push(provisional[i - w - 1]);
                    }
                    if c + 1 < w {
                        push(provisional[i - w + 1]);
                    }
                }
            }
            if n == 0 {
                let l = parent.len() as u32;
                parent.push(l);
                provisional[i] = l;
            } else {
                let first = neighbors[0];
                for &other in &neighbors[1..n] {
                    union(&mut parent, first, other);
                }
                provisional[i] = first;
            }
        }
    }

    // Accumulate statistics per root.
    struct Acc {
        count: usize,
        rmin: usize,
        cmin: usize,
        rmax: usize,
        cmax: usize,
        rsum: f64,
        csum: f64,
        first: usize,
    }
    let mut acc: Vec<Option<Acc>> = (0..parent.len()).map(|_| None).collect();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if provisional[i] == 0 {
                continue;
            }
            let root = find(&mut parent, provisional[i]);
            provisional[i] = root;
            let a = acc[root as usize].get_or_insert(Acc {
                count: 0,
                rmin: r,
                cmin: c,
                rmax: r,
                cmax: c,
                rsum: 0.0,
                csum: 0.0,
                first: i,
            });
            a.count += 1;
            a.rmin = a.rmin.min(r);
            a.cmin = a.cmin.min(c);
            a.rmax = a.rmax.max(r);
            a.cmax = a.cmax.max(c);
            a.rsum += r as f64;
            a.csum += c as f64;
        }
    }

    let mut roots: Vec<(u32, Acc)> = acc
        .into_iter()
        .enumerate()
        .filter_map(|(root, a)| a.map(|a| (root as u32, a)))
        .collect();
    roots.sort_by_key(|(_, a)| (a.rmin, a.cmin, a.first));

    let mut relabel = vec![0u32; parent.len()];
    let mut regions = Vec::with_capacity(roots.len());
    for (idx, (root, a)) in roots.into_iter().enumerate() {
        let label = idx as u32 + 1;
        relabel[root as usize] = label;
        regions.push(Region {
            label,
            pixel_count: a.count,
            row_min: a.rmin,
            col_min: a.cmin,
            row_max: a.rmax,
            col_max: a.cmax,
            centroid: (a.rsum / a.count as f64, a.csum / a.count as f64),
        });
    }
    let labels = provisional.into_iter().map(|l| relabel[l as usize]).collect();
    Labeling {
        labels: Raster::new(h, w, labels).expect("sized"),
        regions,
    }
}

/// Regions of the foreground, ordered by `(row_min, col_min)`.
pub fn connected_components(img: &BinaryImage, connectivity: Connectivity) -> Vec<Region> {
    label_components(img, connectivity).regions
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(rows: &[&str]) -> BinaryImage {
        let h = rows.len();
        let w = rows[0].len();
        let data = rows.iter().flat_map(|r| r.chars().map(|ch| ch == '#')).collect();
        Raster::new(h, w, data).unwrap()
    }

    #[test]
    fn empty_image() {
        assert!(connected_components(&bin(&["....", "...."]), Connectivity::Eight).is_empty());
    }

    #[test]
    fn two_blocks() {
        let img = bin(&["##...", "##...", ".....", "...##", "...##"]);
        let regions = connected_components(&img, Connectivity::Eight);
        assert_eq!(regions.len(), 2);
        assert!(regions.iter().all(|r| r.pixel_count == 4));
        assert_eq!((regions[1].row_min, regions[1].col_min), (3, 3));
        assert_eq!(regions[0].centroid, (0.5, 0.5));
    }

    #[test]
    fn diagonal_depends_on_connectivity() {
        let img = bin(&["#.", ".#"]);
        assert_eq!(connected_components(&img, Connectivity::Eight).len(), 1);
        assert_eq!(connected_components(&img, Connectivity::Four).len(), 2);
    }

    #[test]
    fn u_shape_merges() {
        let img = bin(&["#.#", "#.#", "###"]);
        let regions = connected_components(&img, Connectivity::Four);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixel_count, 7);
    }

    #[test]
    fn pixels_lists_members() {
        let img = bin(&["#.#", "#.."]);
        let lab = label_components(&img, Connectivity::Four);
        assert_eq!(lab.pixels(&lab.regions[0]), vec![(0, 0), (1, 0)]);
        assert_eq!(lab.pixels(&lab.regions[1]), vec![(0, 2)]);
    }
}
