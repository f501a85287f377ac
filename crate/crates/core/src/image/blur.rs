use super::{GrayImage, Raster};
use crate::scalar::Scalar;

/// Differences below a quarter of an 8-bit gray level are rounding noise
/// from the blur, not ink.
const NOISE_FLOOR: f64 = 1.0 / 1024.0;

/// Box filter of side `2 * half_width + 1`, edge replicated, separable.
pub fn box_blur<T: Scalar>(img: &GrayImage<T>, half_width: usize) -> GrayImage<T> {
    let (h, w) = img.dims();
    let src = img.raster();
    let side = (2 * half_width + 1) as f64;
    let hw = half_width as isize;

    // Horizontal running sums in f64.
    let mut tmp = vec![0.0f64; h * w];
    for r in 0..h {
        let row = src.row(r);
        let at = |c: isize| row[c.clamp(0, w as isize - 1) as usize].as_f64();
        let mut acc: f64 = (-hw..=hw).map(at).sum();
        for c in 0..w {
            tmp[r * w + c] = acc;
            let ci = c as isize;
            acc += at(ci + hw + 1) - at(ci - hw);
        }
    }

    let mut out = vec![T::zero(); h * w];
    let area = side * side;
    for c in 0..w {
        let at = |r: isize| tmp[r.clamp(0, h as isize - 1) as usize * w + c];
        let mut acc: f64 = (-hw..=hw).map(at).sum();
        for r in 0..h {
            out[r * w + c] = T::of(acc / area);
            let ri = r as isize;
            acc += at(ri + hw + 1) - at(ri - hw);
        }
    }
    GrayImage::from_raster_clamped(Raster::new(h, w, out).expect("sized"))
}

/// Removes slowly varying lighting and flips polarity so ink is high:
/// `clamp(blur(img) - img, 0, 1)`, rescaled so the maximum is 1.
/// An image with no ink comes back all zero.
pub fn background_subtract<T: Scalar>(img: &GrayImage<T>, blur_half_width: usize) -> GrayImage<T> {
    let blurred = box_blur(img, blur_half_width.max(1));
    let floor = T::of(NOISE_FLOOR);
    let mut diff: Vec<T> = blurred
        .data()
        .iter()
        .zip(img.data())
        .map(|(&b, &x)| {
            let d = b - x;
            if d <= floor {
                T::zero()
            } else {
                d.min(T::one())
            }
        })
        .collect();
    let max = diff.iter().fold(T::zero(), |m, &v| m.max(v));
    if max > T::zero() {
        for v in diff.iter_mut() {
            *v = *v / max;
        }
    }
    let (h, w) = img.dims();
    GrayImage::from_raster_clamped(Raster::new(h, w, diff).expect("sized"))
}
