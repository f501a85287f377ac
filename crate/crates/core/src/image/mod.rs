//! Grayscale rasters and the classical vision primitives built on them.
//!
//! Polarity: after [`background_subtract`], ink is the foreground and has
//! high values. Every morphology routine here is written for that polarity,
//! so erosion is a neighborhood minimum and dilation a neighborhood maximum.
//! Borders are handled by replicating the edge pixel.

mod blob;
mod blur;
mod color;
mod components;
mod convolve;
mod kmeans;
mod morphology;
mod otsu;
mod resize;

pub use blob::{simple_blob_detect, BlobParams, Keypoint};
pub use blur::{background_subtract, box_blur};
pub use color::{to_grayscale, to_grayscale_u8};
pub use components::{connected_components, label_components, Connectivity, Labeling, Region};
pub use convolve::{convolve2d, Kernel};
pub use kmeans::kmeans2d;
pub use morphology::{close, dilate, erode, open, StructuringElement};
pub use otsu::{binarize_otsu, intensity_histogram, otsu_threshold, otsu_threshold_values};
pub use resize::resize_max_dim;

use std::ops::Deref;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("empty image")]
    Empty,
    #[error("buffer length {len} does not match {height}x{width}x{channels}")]
    BadLength {
        len: usize,
        height: usize,
        width: usize,
        channels: usize,
    },
    #[error("pixel value {value} at index {index} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("degenerate histogram")]
    DegenerateHistogram,
    #[error("kernel {kh}x{kw} larger than image {h}x{w}")]
    KernelTooLarge { kh: usize, kw: usize, h: usize, w: usize },
    #[error("kernel dimensions must be odd, got {0}x{1}")]
    EvenKernel(usize, usize),
    #[error("kernel anchor ({0}, {1}) outside kernel")]
    BadAnchor(usize, usize),
    #[error("k = {k} exceeds number of points {n}")]
    TooFewPoints { k: usize, n: usize },
    #[error("invalid structuring element: {0}")]
    BadStructuringElement(String),
}

/// Dense row-major 2-D array with no range constraint. Filter responses
/// and intermediate sums live here.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster<T> {
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Copy> Raster<T> {
    pub fn new(height: usize, width: usize, data: Vec<T>) -> Result<Self, ImageError> {
        if data.len() != height * width {
            return Err(ImageError::BadLength {
                len: data.len(),
                height,
                width,
                channels: 1,
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: T) -> Self {
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    /// Pixel lookup with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> T {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.data[r * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Raster<U> {
        Raster {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Grayscale image with every sample in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage<T>(Raster<T>);

impl<T: Scalar> GrayImage<T> {
    pub fn new(height: usize, width: usize, data: Vec<T>) -> Result<Self, ImageError> {
        Self::from_raster(Raster::new(height, width, data)?)
    }

    pub fn from_raster(raster: Raster<T>) -> Result<Self, ImageError> {
        if let Some((index, &v)) = raster
            .data
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= T::zero() && v <= T::one()))
        {
            return Err(ImageError::OutOfRange {
                index,
                value: v.as_f64(),
            });
        }
        Ok(Self(raster))
    }

    /// Wraps a raster after clamping every sample into `[0, 1]`.
    pub fn from_raster_clamped(mut raster: Raster<T>) -> Self {
        for v in raster.data.iter_mut() {
            *v = if v.is_nan() {
                T::zero()
            } else {
                v.max(T::zero()).min(T::one())
            };
        }
        Self(raster)
    }

    pub fn filled(height: usize, width: usize, value: T) -> Self {
        Self::from_raster_clamped(Raster::filled(height, width, value))
    }

    pub fn raster(&self) -> &Raster<T> {
        &self.0
    }

    pub fn into_raster(self) -> Raster<T> {
        self.0
    }

    /// Invert intensities, `1 - x`.
    pub fn inverted(&self) -> Self {
        Self(self.0.map(|v| T::one() - v))
    }

    /// Converts between sample types.
    pub fn cast<U: Scalar>(&self) -> GrayImage<U> {
        GrayImage::from_raster_clamped(self.0.map(|v| U::of(v.as_f64())))
    }

    /// Values quantized to 8 bits, 0 = black. Used when encoding overlays.
    pub fn to_u8(&self) -> Vec<u8> {
        self.0
            .data
            .iter()
            .map(|&v| (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

impl<T> Deref for GrayImage<T> {
    type Target = Raster<T>;

    fn deref(&self) -> &Raster<T> {
        &self.0
    }
}

/// Binary raster, `true` = foreground ink.
pub type BinaryImage = Raster<bool>;

impl BinaryImage {
    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Threshold a gray image: pixels `>= threshold` become foreground.
pub fn binarize<T: Scalar>(img: &GrayImage<T>, threshold: T) -> BinaryImage {
    img.raster().map(|v| v >= threshold)
}
