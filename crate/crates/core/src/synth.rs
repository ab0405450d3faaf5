//! Synthetic reflection-contaminated images, `Y = w T + (1 - w) (k * R)`
//! with `k` a truncated Gaussian.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{ImagePlane, ImageTensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendParams {
    w: f64,
    sigma: f64,
    radius: usize,
}

impl BlendParams {
    /// Kernel radius defaults to `ceil(3 sigma)`.
    pub fn new(w: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Self::with_radius(w, sigma, (3.0 * sigma).ceil() as usize)
    }

    pub fn with_radius(w: f64, sigma: f64, radius: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("w must lie in [0, 1], got {w}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let min_radius = (3.0 * sigma).ceil() as usize;
        if radius < min_radius {
            return Err(Error::InvalidParameter(format!(
                "radius {radius} is below ceil(3 sigma) = {min_radius}"
            )));
        }
        Ok(Self { w, sigma, radius })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }
}

/// Normalized 1-D Gaussian taps for offsets `-radius..=radius`.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Half-sample symmetric reflection: `... x1 x0 | x0 x1 ... x(n-1) | x(n-1) ...`.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

fn convolve_line(src: &[f64], dst: &mut [f64], taps: &[f64]) {
    let n = src.len();
    let r = (taps.len() / 2) as isize;
    for (i, out) in dst.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (t, &w) in taps.iter().enumerate() {
            acc += w * src[reflect(i as isize + t as isize - r, n)];
        }
        *out = acc;
    }
}

pub fn blur_plane(plane: &ImagePlane, sigma: f64, radius: usize) -> ImagePlane {
    let taps = gaussian_kernel(sigma, radius);
    let (h, w) = plane.dims();

    let mut horiz = vec![0.0; h * w];
    horiz
        .par_chunks_mut(w)
        .zip(plane.as_slice().par_chunks(w))
        .for_each(|(dst, src)| convolve_line(src, dst, &taps));

    let mut cols = vec![0.0; h * w];
    transpose::transpose(&horiz, &mut cols, w, h);
    let mut blurred = vec![0.0; h * w];
    blurred
        .par_chunks_mut(h)
        .zip(cols.par_chunks(h))
        .for_each(|(dst, src)| convolve_line(src, dst, &taps));
    transpose::transpose(&blurred, &mut horiz, h, w);
    ImagePlane::new(h, w, horiz).expect("dimensions are unchanged")
}

/// Separable Gaussian blur with mirror padding. Preserves the mean.
pub fn gaussian_blur(r: &ImageTensor, params: &BlendParams) -> ImageTensor {
    let channels = r
        .channels()
        .iter()
        .map(|p| blur_plane(p, params.sigma, params.radius))
        .collect();
    ImageTensor::new(channels).expect("shape is unchanged")
}

/// `w t + (1 - w) blur(r)`.
pub fn blend(t: &ImageTensor, r: &ImageTensor, params: &BlendParams) -> Result<ImageTensor> {
    t.check_same_shape(r)?;
    let blurred = gaussian_blur(r, params);
    let w = params.w;
    t.zip_map(&blurred, |t, r| w * t + (1.0 - w) * r)
}

pub const TOY_MIN_SIZE: usize = 64;

/// Procedural transmission/reflection pair: a dark "T" over wood grain and a
/// bright "R" over sand. Deterministic for a given seed.
pub fn make_toy_example(height: usize, width: usize, seed: u64) -> Result<(ImageTensor, ImageTensor)> {
    if height < TOY_MIN_SIZE || width < TOY_MIN_SIZE {
        return Err(Error::TooSmall {
            height,
            width,
            min: TOY_MIN_SIZE,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phases: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 * PI);
    let (hf, wf) = (height as f64, width as f64);

    // Planks of constant tone with sharp dark grain lines: edges are step
    // edges, so they survive thresholding the way in-focus detail does.
    let plank_width = (wf / 9.0).max(8.0);
    let plank_tones: Vec<f64> = (0..16).map(|_| 0.45 + 0.3 * rng.random::<f64>()).collect();
    let t_box = GlyphBox::new(0.12 * hf, 0.10 * wf, 0.55 * hf, 0.45 * wf);
    let wood = ImagePlane::from_fn(height, width, |i, j| {
        if t_box.contains(i, j, glyph_t) {
            return 0.08;
        }
        let (y, x) = (i as f64, j as f64);
        let plank = ((x / plank_width) as usize) % plank_tones.len();
        let warp = 5.0 * (y / 41.0 + phases[0]).sin() + 2.0 * (y / 17.0 + phases[1]).sin();
        let grain = (x + warp + 3.0 * plank as f64).rem_euclid(13.0 + (plank % 3) as f64);
        let line = if grain < 1.5 { 0.28 } else { 0.0 };
        plank_tones[plank] - line
    })?;

    let r_box = GlyphBox::new(0.35 * hf, 0.40 * wf, 0.55 * hf, 0.45 * wf);
    let sand_noise: Vec<f64> = (0..height * width).map(|_| rng.random::<f64>() - 0.5).collect();
    let sand = ImagePlane::from_fn(height, width, |i, j| {
        let (y, x) = (i as f64, j as f64);
        let dunes = (2.0 * PI * (0.7 * x + 0.3 * y) / 61.0 + phases[2]).sin();
        let base = 0.5 + 0.12 * dunes + 0.3 * sand_noise[i * width + j];
        if r_box.contains(i, j, glyph_r) {
            0.97
        } else {
            base
        }
    })?;

    let tint = |p: &ImagePlane, gains: [f64; 3]| {
        ImageTensor::rgb(
            p.map(|v| v * gains[0]),
            p.map(|v| v * gains[1]),
            p.map(|v| v * gains[2]),
        )
    };
    let t = tint(&wood, [1.0, 0.82, 0.6])?;
    let r = tint(&sand, [0.98, 0.92, 0.8])?;
    Ok((t, r))
}

struct GlyphBox {
    top: f64,
    left: f64,
    height: f64,
    width: f64,
}

impl GlyphBox {
    fn new(top: f64, left: f64, height: f64, width: f64) -> Self {
        Self {
            top,
            left,
            height,
            width,
        }
    }

    fn contains(&self, i: usize, j: usize, glyph: fn(f64, f64) -> bool) -> bool {
        let v = (i as f64 + 0.5 - self.top) / self.height;
        let u = (j as f64 + 0.5 - self.left) / self.width;
        (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) && glyph(u, v)
    }
}

fn glyph_t(u: f64, v: f64) -> bool {
    v < 0.18 || (0.41..0.59).contains(&u)
}

fn glyph_r(u: f64, v: f64) -> bool {
    let stem = u < 0.2;
    let bowl_top = v < 0.14 && u < 0.8;
    let bowl_mid = (0.46..0.6).contains(&v) && u < 0.8;
    let bowl_side = (0.66..0.84).contains(&u) && v < 0.6;
    // leg from (0.35, 0.55) to (0.9, 1.0)
    let (ax, ay, bx, by) = (0.35, 0.55, 0.9, 1.0);
    let (dx, dy) = (bx - ax, by - ay);
    let s = (((u - ax) * dx + (v - ay) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let (px, py) = (ax + s * dx - u, ay + s * dy - v);
    let leg = (px * px + py * py).sqrt() < 0.09;
    stem || bowl_top || bowl_mid || bowl_side || leg
}
