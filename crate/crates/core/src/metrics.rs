//! PSNR and single-scale SSIM.
//!
//! SSIM uses the usual defaults: an 11x11 Gaussian window with sigma 1.5,
//! `C1 = (0.01 peak)^2`, `C2 = (0.03 peak)^2`, averaged over every window
//! position that fits entirely inside the image. Color images average the
//! per-channel scores.

use crate::error::{Error, Result};
use crate::synth::gaussian_kernel;
use crate::tensor::{ImagePlane, ImageTensor};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// `f64::INFINITY` when the inputs are identical.
    pub psnr_db: f64,
    pub ssim: f64,
    /// `(psnr_db, ssim)` for each channel.
    pub per_channel: Vec<(f64, f64)>,
}

/// Mean squared error over all pixels and channels.
pub fn mse(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    a.check_same_shape(b)?;
    let (h, w, c) = a.shape();
    let sum: f64 = a
        .channels()
        .iter()
        .zip(b.channels())
        .map(|(pa, pb)| plane_sq_err(pa, pb))
        .sum();
    Ok(sum / (h * w * c) as f64)
}

fn plane_sq_err(a: &ImagePlane, b: &ImagePlane) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// `10 log10(peak^2 / MSE)`; identical inputs give `+inf`.
pub fn psnr(a: &ImageTensor, b: &ImageTensor, peak: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

pub fn ssim(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    ssim_with_peak(a, b, 1.0)
}

pub fn ssim_with_peak(a: &ImageTensor, b: &ImageTensor, peak: f64) -> Result<f64> {
    a.check_same_shape(b)?;
    check_ssim_size(a)?;
    let total: f64 = a
        .channels()
        .iter()
        .zip(b.channels())
        .map(|(pa, pb)| ssim_plane(pa, pb, peak))
        .sum();
    Ok(total / a.num_channels() as f64)
}

pub fn evaluate(reference: &ImageTensor, test: &ImageTensor) -> Result<MetricReport> {
    reference.check_same_shape(test)?;
    check_ssim_size(reference)?;
    let per_channel: Vec<(f64, f64)> = reference
        .channels()
        .iter()
        .zip(test.channels())
        .map(|(a, b)| {
            let m = plane_sq_err(a, b) / a.len() as f64;
            (psnr_from_mse(m, 1.0), ssim_plane(a, b, 1.0))
        })
        .collect();
    Ok(MetricReport {
        psnr_db: psnr(reference, test, 1.0)?,
        ssim: per_channel.iter().map(|c| c.1).sum::<f64>() / per_channel.len() as f64,
        per_channel,
    })
}

fn check_ssim_size(a: &ImageTensor) -> Result<()> {
    if a.height() < SSIM_WINDOW || a.width() < SSIM_WINDOW {
        return Err(Error::TooSmall {
            height: a.height(),
            width: a.width(),
            min: SSIM_WINDOW,
        });
    }
    Ok(())
}

/// Valid-mode separable filtering: output is `(h - k + 1) x (w - k + 1)`.
fn filter_valid(src: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut rows = vec![0.0; h * ow];
    for i in 0..h {
        let line = &src[i * w..(i + 1) * w];
        for j in 0..ow {
            rows[i * ow + j] = taps.iter().zip(&line[j..j + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for i in 0..oh {
        for (t, &tap) in taps.iter().enumerate() {
            let src_row = &rows[(i + t) * ow..(i + t + 1) * ow];
            let dst = &mut out[i * ow..(i + 1) * ow];
            for (d, s) in dst.iter_mut().zip(src_row) {
                *d += tap * s;
            }
        }
    }
    out
}

fn ssim_plane(a: &ImagePlane, b: &ImagePlane, peak: f64) -> f64 {
    let (h, w) = a.dims();
    let taps = gaussian_kernel(SSIM_SIGMA, SSIM_WINDOW / 2);
    let c1 = (0.01 * peak).powi(2);
    let c2 = (0.03 * peak).powi(2);

    let (xa, xb) = (a.as_slice(), b.as_slice());
    let aa: Vec<f64> = xa.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = xb.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = xa.iter().zip(xb).map(|(x, y)| x * y).collect();

    let mu_a = filter_valid(xa, h, w, &taps);
    let mu_b = filter_valid(xb, h, w, &taps);
    let e_aa = filter_valid(&aa, h, w, &taps);
    let e_bb = filter_valid(&bb, h, w, &taps);
    let e_ab = filter_valid(&ab, h, w, &taps);

    let n = mu_a.len();
    let mut total = 0.0;
    for i in 0..n {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total / n as f64
}
