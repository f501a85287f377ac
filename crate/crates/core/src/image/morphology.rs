//! Grayscale erosion and dilation over flat structuring elements.
//!
//! Erosion is `min_{b in B} f(x + b)`, dilation is `max_{b in B} f(x - b)`
//! (the reflected element), so `open = dilate . erode` is a true opening
//! for asymmetric elements too.

use serde::{Deserialize, Serialize};

use super::{GrayImage, ImageError, Raster};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StructuringElement {
    /// All offsets with `dy^2 + dx^2 <= radius^2`.
    Disc(usize),
    /// One pixel tall, `width` pixels wide.
    Horizontal(usize),
    /// `height` pixels tall, one pixel wide.
    Vertical(usize),
}

/// One row of an element: offsets `dy` and `dx` in `[dx_lo, dx_hi]`.
#[derive(Clone, Copy, Debug)]
struct Span {
    dy: isize,
    dx_lo: isize,
    dx_hi: isize,
}

impl StructuringElement {
    pub fn validate(&self) -> Result<(), ImageError> {
        let ok = match *self {
            StructuringElement::Disc(r) => r >= 1,
            StructuringElement::Horizontal(n) | StructuringElement::Vertical(n) => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(ImageError::BadStructuringElement(format!("{self:?}")))
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match *self {
            StructuringElement::Disc(_) => true,
            StructuringElement::Horizontal(n) | StructuringElement::Vertical(n) => n % 2 == 1,
        }
    }

    /// Offsets `(dy, dx)` in row-major order.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        self.spans()
            .into_iter()
            .flat_map(|s| (s.dx_lo..=s.dx_hi).map(move |dx| (s.dy, dx)))
            .collect()
    }

    fn spans(&self) -> Vec<Span> {
        match *self {
            StructuringElement::Disc(r) => {
                let r = r as isize;
                (-r..=r)
                    .map(|dy| {
                        let half = ((r * r - dy * dy) as f64).sqrt().floor() as isize;
                        Span {
                            dy,
                            dx_lo: -half,
                            dx_hi: half,
                        }
                    })
                    .collect()
            }
            StructuringElement::Horizontal(w) => {
                let lo = -((w as isize - 1) / 2);
                vec![Span {
                    dy: 0,
                    dx_lo: lo,
                    dx_hi: lo + w as isize - 1,
                }]
            }
            StructuringElement::Vertical(h) => {
                let lo = -((h as isize - 1) / 2);
                (lo..lo + h as isize)
                    .map(|dy| Span {
                        dy,
                        dx_lo: 0,
                        dx_hi: 0,
                    })
                    .collect()
            }
        }
    }

    fn reflected_spans(&self) -> Vec<Span> {
        self.spans()
            .into_iter()
            .map(|s| Span {
                dy: -s.dy,
                dx_lo: -s.dx_hi,
                dx_hi: -s.dx_lo,
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Extremum {
    Min,
    Max,
}

impl Extremum {
    #[inline]
    fn pick<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            Extremum::Min => {
                if b < a {
                    b
                } else {
                    a
                }
            }
            Extremum::Max => {
                if b > a {
                    b
                } else {
                    a
                }
            }
        }
    }
}

/// Sliding extremum along each row over `[c + lo, c + hi]`, edge
/// replicated (van Herk / Gil-Werman, O(1) per pixel).
fn row_extremum<T: Scalar>(src: &Raster<T>, lo: isize, hi: isize, op: Extremum) -> Vec<T> {
    let (h, w) = src.dims();
    let len = (hi - lo + 1) as usize;
    let mut out = vec![T::zero(); h * w];
    if len == 1 {
        for r in 0..h {
            let row = src.row(r);
            for c in 0..w {
                out[r * w + c] = row[(c as isize + lo).clamp(0, w as isize - 1) as usize];
            }
        }
        return out;
    }
    // Padded row: index p corresponds to column p + lo.
    let padded_len = w + len - 1;
    let mut padded = vec![T::zero(); padded_len];
    let mut prefix = vec![T::zero(); padded_len];
    let mut suffix = vec![T::zero(); padded_len];
    for r in 0..h {
        let row = src.row(r);
        fill_clamped(&mut padded, row, lo);
        for (block, pre) in padded.chunks(len).zip(prefix.chunks_mut(len)) {
            let mut acc = block[0];
            for (v, out) in block.iter().zip(pre.iter_mut()) {
                acc = op.pick(acc, *v);
                *out = acc;
            }
        }
        for (block, suf) in padded.chunks(len).zip(suffix.chunks_mut(len)) {
            let mut acc = block[block.len() - 1];
            for (v, out) in block.iter().zip(suf.iter_mut()).rev() {
                acc = op.pick(acc, *v);
                *out = acc;
            }
        }
        let dst = &mut out[r * w..(r + 1) * w];
        for (c, d) in dst.iter_mut().enumerate() {
            // Window [c, c + len - 1] in padded coordinates.
            *d = op.pick(suffix[c], prefix[c + len - 1]);
        }
    }
    out
}

/// `padded[p] = row[clamp(p + lo, 0, w - 1)]`.
fn fill_clamped<T: Scalar>(padded: &mut [T], row: &[T], lo: isize) {
    let w = row.len() as isize;
    let n = padded.len() as isize;
    // Columns p + lo below 0 take row[0]; above w - 1 take row[w - 1].
    let left = (-lo).clamp(0, n) as usize;
    let right = (w - lo).clamp(left as isize, n) as usize;
    padded[..left].fill(row[0]);
    let src0 = (left as isize + lo) as usize;
    padded[left..right].copy_from_slice(&row[src0..src0 + (right - left)]);
    padded[right..].fill(row[row.len() - 1]);
}

/// Centered windows up to this half width grow one column per side at a
/// time; longer ones use [`row_extremum`].
const SHORT_HALF_WIDTH: isize = 8;

/// Row extrema over `[c - k, c + k]` for each ascending half width `k`,
/// edge replicated. Widening by one column per side is a two-element
/// update per pixel.
fn centered_extrema<T: Scalar>(src: &Raster<T>, halves: &[isize], op: Extremum) -> Vec<Vec<T>> {
    let (h, w) = src.dims();
    let kmax = *halves.last().expect("nonempty");
    let pad = kmax as usize;
    let mut outs: Vec<Vec<T>> = halves.iter().map(|_| vec![T::zero(); h * w]).collect();
    let mut padded = vec![T::zero(); w + 2 * pad];
    let mut acc = vec![T::zero(); w];
    for r in 0..h {
        let row = src.row(r);
        fill_clamped(&mut padded, row, -kmax);
        acc.copy_from_slice(row);
        let mut next = 0;
        for k in 0..=kmax {
            if k > 0 {
                let left = &padded[pad - k as usize..pad - k as usize + w];
                let right = &padded[pad + k as usize..pad + k as usize + w];
                for ((a, &l), &rt) in acc.iter_mut().zip(left).zip(right) {
                    *a = op.pick(op.pick(*a, l), rt);
                }
            }
            if next < halves.len() && halves[next] == k {
                outs[next][r * w..(r + 1) * w].copy_from_slice(&acc);
                next += 1;
            }
        }
    }
    outs
}

fn filter<T: Scalar>(img: &GrayImage<T>, spans: &[Span], op: Extremum) -> GrayImage<T> {
    let (h, w) = img.dims();
    let src = img.raster();
    let mut cache: Vec<((isize, isize), Vec<T>)> = Vec::new();
    let centered = spans.iter().all(|s| s.dx_lo == -s.dx_hi);
    let max_half = spans.iter().map(|s| s.dx_hi).max().unwrap_or(0);
    if centered && max_half <= SHORT_HALF_WIDTH {
        let mut halves: Vec<isize> = spans.iter().map(|s| s.dx_hi).collect();
        halves.sort_unstable();
        halves.dedup();
        for (k, rows) in halves.iter().zip(centered_extrema(src, &halves, op)) {
            cache.push(((-k, *k), rows));
        }
    } else {
        for s in spans {
            if !cache.iter().any(|(k, _)| *k == (s.dx_lo, s.dx_hi)) {
                cache.push((
                    (s.dx_lo, s.dx_hi),
                    row_extremum(src, s.dx_lo, s.dx_hi, op),
                ));
            }
        }
    }
    let lookup = |s: &Span| -> &Vec<T> {
        &cache
            .iter()
            .find(|(k, _)| *k == (s.dx_lo, s.dx_hi))
            .expect("cached")
            .1
    };

    let mut out: Vec<T> = Vec::with_capacity(h * w);
    let first = &spans[0];
    let first_rows = lookup(first);
    for r in 0..h {
        let sr = (r as isize + first.dy).clamp(0, h as isize - 1) as usize;
        out.extend_from_slice(&first_rows[sr * w..(sr + 1) * w]);
    }
    for s in &spans[1..] {
        let rows = lookup(s);
        for r in 0..h {
            let sr = (r as isize + s.dy).clamp(0, h as isize - 1) as usize;
            let src_row = &rows[sr * w..(sr + 1) * w];
            let dst = &mut out[r * w..(r + 1) * w];
            for (d, &v) in dst.iter_mut().zip(src_row) {
                *d = op.pick(*d, v);
            }
        }
    }
    GrayImage::from_raster_clamped(Raster::new(h, w, out).expect("sized"))
}

/// Neighborhood minimum over `se`. Removes foreground structures that the
/// element does not fit inside.
pub fn erode<T: Scalar>(img: &GrayImage<T>, se: StructuringElement) -> GrayImage<T> {
    filter(img, &se.spans(), Extremum::Min)
}

/// Neighborhood maximum over the reflected `se`.
pub fn dilate<T: Scalar>(img: &GrayImage<T>, se: StructuringElement) -> GrayImage<T> {
    filter(img, &se.reflected_spans(), Extremum::Max)
}

/// Erosion followed by dilation.
pub fn open<T: Scalar>(img: &GrayImage<T>, se: StructuringElement) -> GrayImage<T> {
    dilate(&erode(img, se), se)
}

/// Dilation followed by erosion.
pub fn close<T: Scalar>(img: &GrayImage<T>, se: StructuringElement) -> GrayImage<T> {
    erode(&dilate(img, se), se)
}
