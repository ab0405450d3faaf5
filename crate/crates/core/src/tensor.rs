//! Dense double-precision image containers.
//!
//! An [`ImagePlane`] is a single row-major `height x width` grid. An
//! [`ImageTensor`] is one (grayscale) or three (RGB) planes sharing the same
//! dimensions. Values are nominally in `[0, 1]` at codec boundaries but are
//! unbounded everywhere else.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ImagePlane {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(height, width)?;
        if data.len() != height * width {
            return Err(Error::DataLength {
                expected: height * width,
                actual: data.len(),
            });
        }
        Ok(Self { height, width, data })
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Self::filled(height, width, 0.0)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        check_dims(height, width)?;
        Ok(Self {
            height,
            width,
            data: vec![value; height * width],
        })
    }

    /// Builds a plane by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(height, width)?;
        let mut data = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        Ok(Self { height, width, data })
    }

    /// A zero plane with the same dimensions as `self`.
    pub fn zeros_like(&self) -> Self {
        Self {
            height: self.height,
            width: self.width,
            data: vec![0.0; self.data.len()],
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
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false; planes have at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two equally sized planes.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            height: self.height,
            width: self.width,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch {
                expected: (self.height, self.width, 1),
                actual: (other.height, other.width, 1),
            });
        }
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Largest absolute elementwise difference. Panics on mismatched dims.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims(), other.dims(), "plane dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dims(height: usize, width: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::EmptyDimensions { height, width });
    }
    Ok(())
}

/// One or three planes of identical size.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    channels: Vec<ImagePlane>,
}

impl ImageTensor {
    pub fn new(channels: Vec<ImagePlane>) -> Result<Self> {
        if channels.len() != 1 && channels.len() != 3 {
            return Err(Error::ChannelCount(channels.len()));
        }
        let (h, w) = channels[0].dims();
        for c in &channels[1..] {
            if c.dims() != (h, w) {
                return Err(Error::ShapeMismatch {
                    expected: (h, w, channels.len()),
                    actual: (c.height(), c.width(), channels.len()),
                });
            }
        }
        Ok(Self { channels })
    }

    pub fn gray(plane: ImagePlane) -> Self {
        Self { channels: vec![plane] }
    }

    pub fn rgb(r: ImagePlane, g: ImagePlane, b: ImagePlane) -> Result<Self> {
        Self::new(vec![r, g, b])
    }

    #[inline]
    pub fn channels(&self) -> &[ImagePlane] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<ImagePlane> {
        self.channels
    }

    #[inline]
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    /// `(height, width, channels)`
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height(), self.width(), self.num_channels())
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            channels: self.channels.iter().map(|c| c.map(&f)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.zip_map(b, &f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { channels })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "tensor shapes differ");
        self.channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

impl From<ImagePlane> for ImageTensor {
    fn from(plane: ImagePlane) -> Self {
        Self::gray(plane)
    }
}
