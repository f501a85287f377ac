use super::{GrayImage, Raster};
use crate::scalar::Scalar;

/// Bilinear downscale so the larger side equals `max_dim`. Images already
/// within the limit are returned unchanged; nothing is ever upscaled.
pub fn resize_max_dim<T: Scalar>(img: &GrayImage<T>, max_dim: usize) -> GrayImage<T> {
    let (h, w) = img.dims();
    let max_dim = max_dim.max(1);
    let major = h.max(w);
    if major <= max_dim {
        return img.clone();
    }
    let scale = max_dim as f64 / major as f64;
    let minor = |d: usize| ((d as f64 * scale).round() as usize).max(1);
    let (nh, nw) = if h >= w {
        (max_dim, minor(w))
    } else {
        (minor(h), max_dim)
    };
    resize_bilinear(img, nh, nw)
}

/// Pixel-center aligned bilinear resampling.
fn resize_bilinear<T: Scalar>(img: &GrayImage<T>, nh: usize, nw: usize) -> GrayImage<T> {
    let (h, w) = img.dims();
    let sy = h as f64 / nh as f64;
    let sx = w as f64 / nw as f64;

    let taps = |n: usize, scale: f64, len: usize| -> Vec<(usize, usize, T)> {
        (0..n)
            .map(|i| {
                let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (len - 1) as f64);
                let i0 = src.floor() as usize;
                let i1 = (i0 + 1).min(len - 1);
                (i0, i1, T::of(src - i0 as f64))
            })
            .collect()
    };
    let ytaps = taps(nh, sy, h);
    let xtaps = taps(nw, sx, w);

    let src = img.raster();
    let mut out = Vec::with_capacity(nh * nw);
    for &(y0, y1, fy) in &ytaps {
        let r0 = src.row(y0);
        let r1 = src.row(y1);
        for &(x0, x1, fx) in &xtaps {
            let top = r0[x0] + (r0[x1] - r0[x0]) * fx;
            let bot = r1[x0] + (r1[x1] - r1[x0]) * fx;
            out.push(top + (bot - top) * fy);
        }
    }
    GrayImage::from_raster_clamped(Raster::new(nh, nw, out).expect("sized"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_large_image() {
        let img = GrayImage::<f32>::filled(2000, 1500, 0.5);
        let out = resize_max_dim(&img, 1000);
        assert_eq!(out.dims(), (1000, 750));
    }

    #[test]
    fn landscape_rounds_minor_side() {
        let img = GrayImage::<f32>::filled(333, 1001, 0.5);
        let out = resize_max_dim(&img, 1000);
        assert_eq!(out.dims(), (333, 1000));
    }

    #[test]
    fn never_upscales() {
        let img = GrayImage::<f64>::filled(800, 600, 0.25);
        let out = resize_max_dim(&img, 1000);
        assert_eq!(out, img);
    }

    #[test]
    fn constant_preserved() {
        let img = GrayImage::<f64>::filled(1234, 777, 0.3141);
        let out = resize_max_dim(&img, 500);
        assert!(out.data().iter().all(|v| (v - 0.3141).abs() < 1e-6));
    }

    #[test]
    fn thin_minor_side_is_at_least_one() {
        let img = GrayImage::<f64>::filled(1, 5000, 1.0);
        assert_eq!(resize_max_dim(&img, 1000).dims(), (1, 1000));
    }
}
