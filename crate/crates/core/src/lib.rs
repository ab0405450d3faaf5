//! Fast single-image reflection suppression.
//!
//! Weak gradients of the input (mostly the blurred reflection) are zeroed by
//! a magnitude threshold `h`, and the output is the unique minimizer of
//!
//! ```text
//! 1/2 |L(T) - div(threshold_h(grad Y))|^2 + eps/2 |T - Y|^2
//! ```
//!
//! whose normal equation `(L^2 + eps) T = L(div(...)) + eps Y` is solved in
//! closed form with a 2-D DCT under mirror boundary conditions.
//!
//! ```
//! use dereflect_core::{suppress, ImagePlane, ImageTensor, SuppressionParams};
//!
//! let y = ImageTensor::gray(ImagePlane::from_fn(32, 32, |i, j| ((i + j) % 7) as f64 / 7.0).unwrap());
//! let t = suppress(&y, &SuppressionParams::new(0.03, 1e-8).unwrap());
//! assert_eq!(t.shape(), y.shape());
//! ```

#![cfg_attr(test, allow(clippy::needless_range_loop))]

pub mod codec;
pub mod diff;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod spectral;
pub mod synth;
pub mod tensor;

#[cfg(test)]
mod testing;

pub use codec::{decode_image, encode_png, read_image, write_png};
pub use diff::{div, grad, laplacian, threshold_gradient, GradientField, NormMode, ThresholdParams};
pub use error::{Error, Result};
pub use metrics::{evaluate, psnr, ssim, MetricReport};
pub use pipeline::{build_rhs, suppress, PreparedImage, SuppressionParams};
pub use spectral::{
    dct2, idct2, solve_poisson, solve_screened_biharmonic, SolverParams, SpectralKernel, SpectralSolver,
};
pub use synth::{blend, gaussian_blur, make_toy_example, BlendParams};
pub use tensor::{ImagePlane, ImageTensor};
