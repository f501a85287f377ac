use super::{GrayImage, ImageError, Raster};
use crate::scalar::Scalar;

const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// Luma of an interleaved RGB buffer whose channels lie in `[0, max_value]`
/// (`max_value` is 255 for 8-bit data, 1 for normalized data).
pub fn to_grayscale<T: Scalar>(
    height: usize,
    width: usize,
    rgb: &[T],
    max_value: T,
) -> Result<GrayImage<T>, ImageError> {
    if height == 0 || width == 0 {
        return Err(ImageError::Empty);
    }
    if rgb.len() != height * width * 3 {
        return Err(ImageError::BadLength {
            len: rgb.len(),
            height,
            width,
            channels: 3,
        });
    }
    let (wr, wg, wb) = (T::of(LUMA_R), T::of(LUMA_G), T::of(LUMA_B));
    let data = rgb
        .chunks_exact(3)
        .map(|px| (wr * px[0] + wg * px[1] + wb * px[2]) / max_value)
        .collect();
    Ok(GrayImage::from_raster_clamped(Raster::new(
        height, width, data,
    )?))
}

/// [`to_grayscale`] for 8-bit interleaved RGB.
pub fn to_grayscale_u8<T: Scalar>(
    height: usize,
    width: usize,
    rgb: &[u8],
) -> Result<GrayImage<T>, ImageError> {
    let converted: Vec<T> = rgb.iter().map(|&v| T::of(v as f64)).collect();
    to_grayscale(height, width, &converted, T::of(255.0))
}
