//! 8-bit PNG/JPEG decode and PNG encode.
//!
//! Samples map to `u / 255` on decode. On encode values are clamped to
//! `[0, 1]` and quantized with `round(255 v)`, so decoded lattice values are a
//! fixed point of encode followed by decode.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{Error, Result};
use crate::tensor::{ImagePlane, ImageTensor};

/// Result of decoding, including whether an alpha channel was discarded.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub image: ImageTensor,
    pub alpha_dropped: bool,
}

/// Decodes an 8-bit gray or RGB PNG/JPEG into `[0, 1]` planes.
///
/// Alpha is dropped with a logged warning; use [`decode_image_detailed`] to
/// observe that programmatically.
pub fn decode_image(bytes: &[u8]) -> Result<ImageTensor> {
    let decoded = decode_image_detailed(bytes)?;
    if decoded.alpha_dropped {
        log::warn!("input has an alpha channel; it was dropped");
    }
    Ok(decoded.image)
}

pub fn decode_image_detailed(bytes: &[u8]) -> Result<Decoded> {
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::Decode(e.to_string()))?;
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        other => Error::Decode(other.to_string()),
    })?;

    let (width, height) = (img.width() as usize, img.height() as usize);
    let (samples, channels, alpha_dropped): (Vec<u8>, usize, bool) = match img {
        DynamicImage::ImageLuma8(buf) => (buf.into_raw(), 1, false),
        DynamicImage::ImageLumaA8(buf) => (strip_alpha(buf.as_raw(), 1), 1, true),
        DynamicImage::ImageRgb8(buf) => (buf.into_raw(), 3, false),
        DynamicImage::ImageRgba8(buf) => (strip_alpha(buf.as_raw(), 3), 3, true),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{:?} (only 8-bit gray or RGB is accepted)",
                other.color()
            )))
        }
    };

    let image = planes_from_interleaved(&samples, height, width, channels)?;
    Ok(Decoded { image, alpha_dropped })
}

/// Width and height from the image header without decoding pixel data.
pub fn probe_dimensions(bytes: &[u8]) -> Result<(usize, usize)> {
    let (w, h) = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::Decode(e.to_string()))?
        .into_dimensions()
        .map_err(|e| Error::Decode(e.to_string()))?;
    Ok((h as usize, w as usize))
}

/// Clamps to `[0, 1]` and quantizes to the nearest 8-bit code.
#[inline]
pub fn quantize(v: f64) -> u8 {
    // NaN clamps to 0 here since `clamp` propagates it and `as u8` saturates NaN to 0.
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Encodes as an 8-bit PNG (gray for one channel, RGB for three).
pub fn encode_png(image: &ImageTensor) -> Result<Vec<u8>> {
    let (height, width, channels) = image.shape();
    let mut samples = Vec::with_capacity(height * width * channels);
    for idx in 0..height * width {
        for plane in image.channels() {
            samples.push(quantize(plane.as_slice()[idx]));
        }
    }
    let color = if channels == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    };
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(&samples, width as u32, height as u32, color)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(out)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let bytes = std::fs::read(path)?;
    decode_image(&bytes)
}

pub fn write_png(path: impl AsRef<Path>, image: &ImageTensor) -> Result<()> {
    std::fs::write(path, encode_png(image)?)?;
    Ok(())
}

fn strip_alpha(raw: &[u8], color_channels: usize) -> Vec<u8> {
    raw.chunks_exact(color_channels + 1)
        .flat_map(|px| px[..color_channels].iter().copied())
        .collect()
}

fn planes_from_interleaved(samples: &[u8], height: usize, width: usize, channels: usize) -> Result<ImageTensor> {
    let planes = (0..channels)
        .map(|c| {
            let data = samples
                .iter()
                .skip(c)
                .step_by(channels)
                .map(|&u| f64::from(u) / 255.0)
                .collect();
            ImagePlane::new(height, width, data)
        })
        .collect::<Result<Vec<_>>>()?;
    ImageTensor::new(planes)
}
