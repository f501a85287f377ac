use super::{BinaryImage, GrayImage, ImageError};
use crate::scalar::Scalar;

/// Otsu's threshold over a histogram.
///
/// The returned `t` splits bins into `[0, t)` and `[t, len)`; it maximizes
/// the between-class variance, and the smallest maximizer wins ties.
/// Fewer than two nonempty bins is a degenerate histogram.
pub fn otsu_threshold(histogram: &[u64]) -> Result<usize, ImageError> {
    if histogram.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(ImageError::DegenerateHistogram);
    }
    let total: i128 = histogram.iter().map(|&c| c as i128).sum();
    let total_sum: i128 = histogram
        .iter()
        .enumerate()
        .map(|(i, &c)| i as i128 * c as i128)
        .sum();

    // Between-class variance is proportional to
    // (N * S0 - n0 * S)^2 / (n0 * n1).
    let mut best_t = 0;
    let mut best = f64::NEG_INFINITY;
    let mut n0: i128 = 0;
    let mut s0: i128 = 0;
    for t in 1..histogram.len() {
        n0 += histogram[t - 1] as i128;
        s0 += (t as i128 - 1) * histogram[t - 1] as i128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let num = (total * s0 - n0 * total_sum) as f64;
        let score = num * num / (n0 as f64 * n1 as f64);
        if score > best {
            best = score;
            best_t = t;
        }
    }
    Ok(best_t)
}

/// Otsu split of a collection of small nonnegative integers (region heights,
/// for instance). Values `>= t` form the upper class.
pub fn otsu_threshold_values(values: &[usize]) -> Result<usize, ImageError> {
    let max = values.iter().copied().max().ok_or(ImageError::DegenerateHistogram)?;
    let mut hist = vec![0u64; max + 1];
    for &v in values {
        hist[v] += 1;
    }
    otsu_threshold(&hist)
}

/// 256-bin histogram of an image, bin = round(255 * v).
pub fn intensity_histogram<T: Scalar>(img: &GrayImage<T>) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[bin_of(v)] += 1;
    }
    hist
}

#[inline]
fn bin_of<T: Scalar>(v: T) -> usize {
    // Nonnegative after the clamp, so truncating `x + 0.5` rounds half up.
    ((v.as_f64() * 255.0).clamp(0.0, 255.0) + 0.5) as usize
}

/// Binarize with Otsu's threshold on the 256-bin histogram. Foreground is
/// the high class. Returns `None` when the image has fewer than two levels.
pub fn binarize_otsu<T: Scalar>(img: &GrayImage<T>) -> Option<BinaryImage> {
    let t = otsu_threshold(&intensity_histogram(img)).ok()?;
    Some(img.raster().map(|v| bin_of(v) >= t))
}
