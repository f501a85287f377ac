use super::{ImageError, Raster};
use crate::scalar::Scalar;

/// 2-D convolution kernel with an explicit anchor (the tap aligned with
/// the output pixel).
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T> {
    weights: Raster<T>,
    anchor: (usize, usize),
}

impl<T: Scalar> Kernel<T> {
    /// Kernel anchored at its center; both dimensions must be odd.
    pub fn centered(height: usize, width: usize, weights: Vec<T>) -> Result<Self, ImageError> {
        if height % 2 == 0 || width % 2 == 0 {
            return Err(ImageError::EvenKernel(height, width));
        }
        Self::with_anchor(height, width, weights, (height / 2, width / 2))
    }

    pub fn with_anchor(
        height: usize,
        width: usize,
        weights: Vec<T>,
        anchor: (usize, usize),
    ) -> Result<Self, ImageError> {
        if height == 0 || width == 0 {
            return Err(ImageError::Empty);
        }
        if anchor.0 >= height || anchor.1 >= width {
            return Err(ImageError::BadAnchor(anchor.0, anchor.1));
        }
        Ok(Self {
            weights: Raster::new(height, width, weights)?,
            anchor,
        })
    }

    pub fn weights(&self) -> &Raster<T> {
        &self.weights
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn sum(&self) -> T {
        self.weights.data().iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Nonzero taps as image offsets `(dy, dx, weight)`: output `(r, c)`
    /// reads input `(r + dy, c + dx)`.
    fn taps(&self) -> Vec<(isize, isize, T)> {
        let (kh, kw) = self.weights.dims();
        let (ah, aw) = (self.anchor.0 as isize, self.anchor.1 as isize);
        let mut taps = Vec::new();
        for i in 0..kh {
            for j in 0..kw {
                let wgt = self.weights.get(i, j);
                if wgt != T::zero() {
                    taps.push((ah - i as isize, aw - j as isize, wgt));
                }
            }
        }
        taps
    }
}

/// `out(r, c) = sum_{i,j} k(i, j) * img(r - i + ah, c - j + aw)` with edge
/// replication. Zero taps are skipped, so sparse kernels (comb filters)
/// cost only their support.
pub fn convolve2d<T: Scalar>(img: &Raster<T>, kernel: &Kernel<T>) -> Result<Raster<T>, ImageError> {
    let (h, w) = img.dims();
    let (kh, kw) = kernel.weights.dims();
    if kh > h || kw > w {
        return Err(ImageError::KernelTooLarge { kh, kw, h, w });
    }
    let taps = kernel.taps();
    let mut out = vec![T::zero(); h * w];

    for &(dy, dx, wgt) in &taps {
        for r in 0..h {
            let sr = (r as isize + dy).clamp(0, h as isize - 1) as usize;
            let src = img.row(sr);
            let dst = &mut out[r * w..(r + 1) * w];
            // Interior columns, then the replicated borders.
            let lo = (-dx).clamp(0, w as isize) as usize;
            let hi = (w as isize - dx).clamp(0, w as isize) as usize;
            for (c, d) in dst.iter_mut().enumerate().take(lo) {
                *d += wgt * src[(c as isize + dx).clamp(0, w as isize - 1) as usize];
            }
            if lo < hi {
                let s0 = (lo as isize + dx) as usize;
                for (d, &s) in dst[lo..hi].iter_mut().zip(&src[s0..s0 + (hi - lo)]) {
                    *d += wgt * s;
                }
            }
            for (c, d) in dst.iter_mut().enumerate().skip(hi.max(lo)) {
                *d += wgt * src[(c as isize + dx).clamp(0, w as isize - 1) as usize];
            }
        }
    }
    Raster::new(h, w, out)
}
