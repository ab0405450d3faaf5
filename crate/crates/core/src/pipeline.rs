//! End-to-end reflection suppression.
//!
//! For each channel of the input `Y`:
//!
//! 1. threshold the gradient field, zeroing vectors shorter than `h`;
//! 2. form `P = L(div(thresholded)) + eps * Y`;
//! 3. solve `(L^2 + eps) T = P` in the DCT domain.
//!
//! The output is not clamped; out-of-range values survive until encoding.

use rayon::prelude::*;

use crate::diff::{div, grad, laplacian, threshold_gradient_in_place, GradientField, NormMode, ThresholdParams};
use crate::error::{Error, Result};
use crate::spectral::{SolverParams, SpectralSolver};
use crate::tensor::{ImagePlane, ImageTensor};

pub const DEFAULT_H: f64 = 0.03;
pub const DEFAULT_EPSILON: f64 = 1e-8;
/// Screening weight used for synthetic blends.
pub const SYNTHETIC_EPSILON: f64 = 1e-6;
/// Range of `h` that typically gives useful results.
pub const H_RANGE_HINT: (f64, f64) = (0.01, 0.1);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuppressionParams {
    threshold: ThresholdParams,
    solver: SolverParams,
}

impl SuppressionParams {
    pub fn new(h: f64, epsilon: f64) -> Result<Self> {
        Self::with_norm_mode(h, epsilon, NormMode::default())
    }

    pub fn with_norm_mode(h: f64, epsilon: f64, norm_mode: NormMode) -> Result<Self> {
        Ok(Self {
            threshold: ThresholdParams::new(h, norm_mode)?,
            solver: SolverParams::new(epsilon)?,
        })
    }

    pub fn h(&self) -> f64 {
        self.threshold.h()
    }

    pub fn epsilon(&self) -> f64 {
        self.solver.epsilon()
    }

    pub fn norm_mode(&self) -> NormMode {
        self.threshold.norm_mode
    }

    pub fn threshold(&self) -> &ThresholdParams {
        &self.threshold
    }

    pub fn solver(&self) -> &SolverParams {
        &self.solver
    }
}

impl Default for SuppressionParams {
    fn default() -> Self {
        Self::new(DEFAULT_H, DEFAULT_EPSILON).expect("defaults are valid")
    }
}

/// Right-hand side `L(div(g_thresh)) + eps * y` for one plane.
pub fn build_rhs(y: &ImagePlane, epsilon: f64, g_thresh: &GradientField) -> Result<ImagePlane> {
    y.check_same_dims(&g_thresh.gx)?;
    let mut lap = laplacian(&div(g_thresh));
    for (l, &v) in lap.as_mut_slice().iter_mut().zip(y.as_slice()) {
        *l += epsilon * v;
    }
    Ok(lap)
}

/// Suppresses reflections in `y`. Output has the same shape and is unclamped.
pub fn suppress(y: &ImageTensor, params: &SuppressionParams) -> ImageTensor {
    let gradients = gradients(y);
    suppress_with_gradients(y, gradients, params).expect("gradients were computed from y")
}

/// Per-channel gradient fields of `y`. These do not depend on `h` or `eps`.
pub fn gradients(y: &ImageTensor) -> Vec<GradientField> {
    y.channels().par_iter().map(grad).collect()
}

/// [`suppress`] with gradients precomputed by [`gradients`]. The fields are
/// consumed and thresholded in place.
pub fn suppress_with_gradients(
    y: &ImageTensor,
    mut gradients: Vec<GradientField>,
    params: &SuppressionParams,
) -> Result<ImageTensor> {
    if gradients.len() != y.num_channels() {
        return Err(Error::ShapeMismatch {
            expected: y.shape(),
            actual: (y.height(), y.width(), gradients.len()),
        });
    }
    threshold_gradient_in_place(&mut gradients, params.threshold())?;
    let solver = SpectralSolver::shared(y.height(), y.width())?;
    let eps = params.epsilon();

    let channels = y
        .channels()
        .par_iter()
        .zip(gradients.par_iter())
        .map(|(plane, g)| {
            let rhs = build_rhs(plane, eps, g)?;
            solver.solve_screened(&rhs, params.solver())
        })
        .collect::<Result<Vec<_>>>()?;
    ImageTensor::new(channels)
}

/// A decoded image with its gradient fields cached for repeated solves at
/// different parameters.
#[derive(Debug, Clone)]
pub struct PreparedImage {
    image: ImageTensor,
    gradients: Vec<GradientField>,
}

impl PreparedImage {
    pub fn new(image: ImageTensor) -> Self {
        let gradients = gradients(&image);
        Self { image, gradients }
    }

    pub fn image(&self) -> &ImageTensor {
        &self.image
    }

    pub fn gradients(&self) -> &[GradientField] {
        &self.gradients
    }

    pub fn suppress(&self, params: &SuppressionParams) -> ImageTensor {
        suppress_with_gradients(&self.image, self.gradients.clone(), params).expect("cached gradients match the image")
    }
}
