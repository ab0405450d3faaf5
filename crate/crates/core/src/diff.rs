//! Discrete differential operators under mirror (Neumann) boundary handling.
//!
//! `grad` uses forward differences, which are zero on the last column (x) and
//! last row (y) because the mirrored neighbour equals the boundary sample.
//! `div` is the exact negative adjoint of `grad`, so `laplacian = div . grad`
//! is symmetric negative semidefinite and diagonalized by the DCT-II basis.

use crate::error::{Error, Result};
use crate::tensor::ImagePlane;

/// Forward-difference gradient of one plane.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: ImagePlane,
    pub gy: ImagePlane,
}

impl GradientField {
    pub fn new(gx: ImagePlane, gy: ImagePlane) -> Result<Self> {
        gx.check_same_dims(&gy)?;
        Ok(Self { gx, gy })
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Ok(Self {
            gx: ImagePlane::zeros(height, width)?,
            gy: ImagePlane::zeros(height, width)?,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.gx.dims()
    }

    /// Pixels whose gradient vector is not exactly zero.
    pub fn nonzero_count(&self) -> usize {
        self.gx
            .as_slice()
            .iter()
            .zip(self.gy.as_slice())
            .filter(|(&x, &y)| x != 0.0 || y != 0.0)
            .count()
    }
}

pub fn grad(a: &ImagePlane) -> GradientField {
    let (h, w) = a.dims();
    let src = a.as_slice();
    let mut gx = a.zeros_like();
    let mut gy = a.zeros_like();
    {
        let gx = gx.as_mut_slice();
        for i in 0..h {
            let row = &src[i * w..(i + 1) * w];
            let out = &mut gx[i * w..(i + 1) * w];
            for j in 0..w - 1 {
                out[j] = row[j + 1] - row[j];
            }
        }
    }
    {
        let gy = gy.as_mut_slice();
        for i in 0..h - 1 {
            for j in 0..w {
                gy[i * w + j] = src[(i + 1) * w + j] - src[i * w + j];
            }
        }
    }
    GradientField { gx, gy }
}

/// Negative adjoint of [`grad`]: backward differences with one-sided
/// boundary rows and columns. The last column of `gx` and last row of `gy`
/// are never read, matching the zeros `grad` writes there.
pub fn div(g: &GradientField) -> ImagePlane {
    let (h, w) = g.dims();
    let gx = g.gx.as_slice();
    let gy = g.gy.as_slice();
    let mut out = g.gx.zeros_like();
    let dst = out.as_mut_slice();

    for i in 0..h {
        let row = &gx[i * w..(i + 1) * w];
        let o = &mut dst[i * w..(i + 1) * w];
        if w == 1 {
            continue;
        }
        o[0] = row[0];
        for j in 1..w - 1 {
            o[j] = row[j] - row[j - 1];
        }
        o[w - 1] = -row[w - 2];
    }

    if h > 1 {
        for j in 0..w {
            dst[j] += gy[j];
        }
        for i in 1..h - 1 {
            for j in 0..w {
                dst[i * w + j] += gy[i * w + j] - gy[(i - 1) * w + j];
            }
        }
        for j in 0..w {
            dst[(h - 1) * w + j] -= gy[(h - 2) * w + j];
        }
    }
    out
}

/// Five-point Laplacian with mirror boundary, `div(grad(a))`.
///
/// Evaluated as a single stencil pass with the same per-pixel arithmetic as
/// the composition, so the result is bit-identical to `div(&grad(a))`.
pub fn laplacian(a: &ImagePlane) -> ImagePlane {
    let (h, w) = a.dims();
    let src = a.as_slice();
    let mut out = a.zeros_like();
    let dst = out.as_mut_slice();
    for i in 0..h {
        let row = &src[i * w..(i + 1) * w];
        let o = &mut dst[i * w..(i + 1) * w];
        if w > 1 {
            o[0] = row[1] - row[0];
            for j in 1..w - 1 {
                o[j] = (row[j + 1] - row[j]) - (row[j] - row[j - 1]);
            }
            o[w - 1] = -(row[w - 1] - row[w - 2]);
        }
        if h > 1 {
            if i == 0 {
                let below = &src[w..2 * w];
                for j in 0..w {
                    o[j] += below[j] - row[j];
                }
            } else if i == h - 1 {
                let above = &src[(i - 1) * w..i * w];
                for j in 0..w {
                    o[j] -= row[j] - above[j];
                }
            } else {
                let above = &src[(i - 1) * w..i * w];
                let below = &src[(i + 1) * w..(i + 2) * w];
                for j in 0..w {
                    o[j] += (below[j] - row[j]) - (row[j] - above[j]);
                }
            }
        }
    }
    out
}

/// How the gradient magnitude is measured for thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormMode {
    /// `sqrt(gx^2 + gy^2)` per channel; each channel keeps its own mask.
    #[default]
    PerChannel,
    /// L2 norm over all `2 C` components at a pixel; one mask for every channel.
    JointChannel,
}

impl std::str::FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-channel" => Ok(Self::PerChannel),
            "joint" | "joint-channel" => Ok(Self::JointChannel),
            other => Err(Error::InvalidParameter(format!("unknown norm mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for NormMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::PerChannel => "per-channel",
            Self::JointChannel => "joint",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    h: f64,
    pub norm_mode: NormMode,
}

impl ThresholdParams {
    pub fn new(h: f64, norm_mode: NormMode) -> Result<Self> {
        if h.is_nan() || h < 0.0 {
            return Err(Error::InvalidParameter(format!("threshold h must be >= 0, got {h}")));
        }
        Ok(Self { h, norm_mode })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// Zeroes every gradient vector whose magnitude is below `h`.
///
/// Vectors with magnitude exactly `h` are kept. In joint mode the decision is
/// taken once per pixel from all channels and applied to all of them.
pub fn threshold_gradient(fields: &[GradientField], params: &ThresholdParams) -> Result<Vec<GradientField>> {
    let mut out = fields.to_vec();
    threshold_gradient_in_place(&mut out, params)?;
    Ok(out)
}

pub fn threshold_gradient_in_place(fields: &mut [GradientField], params: &ThresholdParams) -> Result<()> {
    let Some(first) = fields.first() else {
        return Ok(());
    };
    let dims = first.dims();
    if let Some(bad) = fields.iter().find(|f| f.dims() != dims) {
        let (bh, bw) = bad.dims();
        return Err(Error::ShapeMismatch {
            expected: (dims.0, dims.1, fields.len()),
            actual: (bh, bw, fields.len()),
        });
    }
    let h = params.h;

    match params.norm_mode {
        NormMode::PerChannel => {
            for f in fields.iter_mut() {
                let GradientField { gx, gy } = f;
                for (x, y) in gx.as_mut_slice().iter_mut().zip(gy.as_mut_slice()) {
                    if (*x * *x + *y * *y).sqrt() < h {
                        *x = 0.0;
                        *y = 0.0;
                    }
                }
            }
        }
        NormMode::JointChannel => {
            let n = dims.0 * dims.1;
            for idx in 0..n {
                let sq: f64 = fields
                    .iter()
                    .map(|f| {
                        let (x, y) = (f.gx.as_slice()[idx], f.gy.as_slice()[idx]);
                        x * x + y * y
                    })
                    .sum();
                if sq.sqrt() < h {
                    for f in fields.iter_mut() {
                        f.gx.as_mut_slice()[idx] = 0.0;
                        f.gy.as_mut_slice()[idx] = 0.0;
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{dense_neumann_laplacian, random_plane};

    fn inner(a: &ImagePlane, b: &ImagePlane) -> f64 {
        a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = grad(&ImagePlane::filled(5, 7, 0.3).unwrap());
        assert!(g.gx.as_slice().iter().all(|&v| v == 0.0));
        assert!(g.gy.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_has_unit_slope() {
        let n = 6;
        let a = ImagePlane::from_fn(1, n, |_, j| j as f64).unwrap();
        let g = grad(&a);
        assert_eq!(g.gx.as_slice(), &[1.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(g.gy.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grad_matches_loop_oracle() {
        let a = random_plane(5, 4, 11);
        let g = grad(&a);
        for i in 0..5 {
            for j in 0..4 {
                let ex = if j + 1 < 4 { a.get(i, j + 1) - a.get(i, j) } else { 0.0 };
                let ey = if i + 1 < 5 { a.get(i + 1, j) - a.get(i, j) } else { 0.0 };
                assert_eq!(g.gx.get(i, j), ex);
                assert_eq!(g.gy.get(i, j), ey);
            }
        }
    }

    #[test]
    fn boundary_gradients_are_zero() {
        let g = grad(&random_plane(6, 5, 3));
        for i in 0..6 {
            assert_eq!(g.gx.get(i, 4), 0.0);
        }
        for j in 0..5 {
            assert_eq!(g.gy.get(5, j), 0.0);
        }
    }

    #[test]
    fn div_of_zero_is_zero() {
        let d = div(&GradientField::zeros(4, 3).unwrap());
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn div_is_negative_adjoint() {
        for seed in 0..20 {
            let a = random_plane(6, 5, seed);
            let g = GradientField::new(random_plane(6, 5, seed + 100), random_plane(6, 5, seed + 200)).unwrap();
            let ga = grad(&a);
            let lhs = inner(&ga.gx, &g.gx) + inner(&ga.gy, &g.gy);
            let rhs = inner(&a, &div(&g));
            assert!((lhs + rhs).abs() < 1e-12, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn laplacian_matches_dense_operator() {
        let a = random_plane(4, 4, 5);
        let dense = dense_neumann_laplacian(4, 4);
        let got = laplacian(&a);
        for r in 0..16 {
            let want: f64 = (0..16).map(|c| dense[r][c] * a.as_slice()[c]).sum();
            assert!((got.as_slice()[r] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn fused_laplacian_is_bit_identical_to_composition() {
        for (h, w) in [(1, 1), (1, 5), (4, 1), (2, 2), (7, 9), (16, 3)] {
            let a = random_plane(h, w, (h * 100 + w) as u64);
            assert_eq!(laplacian(&a), div(&grad(&a)), "{h}x{w}");
        }
    }

    #[test]
    fn laplacian_interior_stencil() {
        let a = random_plane(5, 5, 8);
        let l = laplacian(&a);
        let (i, j) = (2, 3);
        let want = a.get(i - 1, j) + a.get(i + 1, j) + a.get(i, j - 1) + a.get(i, j + 1) - 4.0 * a.get(i, j);
        assert!((l.get(i, j) - want).abs() < 1e-14);
    }

    #[test]
    fn laplacian_of_constant_and_flux() {
        let l = laplacian(&ImagePlane::filled(3, 8, 2.5).unwrap());
        assert!(l.as_slice().iter().all(|&v| v == 0.0));
        let l = laplacian(&random_plane(9, 7, 1));
        assert!(l.sum().abs() < 1e-12);
    }

    #[test]
    fn degenerate_axes() {
        let a = ImagePlane::from_fn(1, 4, |_, j| (j * j) as f64).unwrap();
        assert_eq!(laplacian(&a).as_slice(), &[1.0, 2.0, 2.0, -5.0]);
        let one = ImagePlane::filled(1, 1, 3.0).unwrap();
        assert_eq!(laplacian(&one).as_slice(), &[0.0]);
    }

    fn single_pixel_field(gx: f64, gy: f64) -> GradientField {
        GradientField::new(
            ImagePlane::filled(1, 1, gx).unwrap(),
            ImagePlane::filled(1, 1, gy).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn threshold_zero_is_identity() {
        let f = grad(&random_plane(5, 6, 2));
        let p = ThresholdParams::new(0.0, NormMode::PerChannel).unwrap();
        assert_eq!(threshold_gradient(std::slice::from_ref(&f), &p).unwrap()[0], f);
    }

    #[test]
    fn threshold_above_max_clears() {
        let f = grad(&random_plane(5, 6, 2));
        let p = ThresholdParams::new(10.0, NormMode::JointChannel).unwrap();
        let out = threshold_gradient(&[f.clone(), f], &p).unwrap();
        assert!(out.iter().all(|g| g.nonzero_count() == 0));
    }

    #[test]
    fn threshold_keeps_ties() {
        let p = ThresholdParams::new(0.1, NormMode::PerChannel).unwrap();
        let out = threshold_gradient(&[single_pixel_field(0.06, 0.08)], &p).unwrap();
        assert_eq!(out[0].gx.get(0, 0), 0.06);
        assert_eq!(out[0].gy.get(0, 0), 0.08);

        let p = ThresholdParams::new(0.100001, NormMode::PerChannel).unwrap();
        let out = threshold_gradient(&[single_pixel_field(0.06, 0.08)], &p).unwrap();
        assert_eq!(out[0].nonzero_count(), 0);
    }

    #[test]
    fn joint_mode_shares_the_mask() {
        // Channel magnitudes 0.05 and 0.05 fall below 0.06 individually,
        // jointly the norm is ~0.0707.
        let fields = [single_pixel_field(0.03, 0.04), single_pixel_field(0.04, 0.03)];
        let per = threshold_gradient(&fields, &ThresholdParams::new(0.06, NormMode::PerChannel).unwrap()).unwrap();
        assert!(per.iter().all(|f| f.nonzero_count() == 0));
        let joint = threshold_gradient(&fields, &ThresholdParams::new(0.06, NormMode::JointChannel).unwrap()).unwrap();
        assert_eq!(joint, fields.to_vec());
    }

    #[test]
    fn threshold_rejects_bad_params() {
        assert!(ThresholdParams::new(-0.1, NormMode::PerChannel).is_err());
        assert!(ThresholdParams::new(f64::NAN, NormMode::PerChannel).is_err());
        let mismatched = [GradientField::zeros(2, 2).unwrap(), GradientField::zeros(2, 3).unwrap()];
        let p = ThresholdParams::new(0.1, NormMode::PerChannel).unwrap();
        assert!(threshold_gradient(&mismatched, &p).is_err());
    }

    #[test]
    fn norm_mode_parses() {
        assert_eq!("per-channel".parse::<NormMode>().unwrap(), NormMode::PerChannel);
        assert_eq!("joint".parse::<NormMode>().unwrap(), NormMode::JointChannel);
        assert!("both".parse::<NormMode>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field(seed: u64) -> GradientField {
            grad(&random_plane(7, 6, seed))
        }

        proptest! {
            #[test]
            fn adjoint_identity(seed in any::<u64>(), h in 1usize..9, w in 1usize..9) {
                let a = random_plane(h, w, seed);
                let g = GradientField::new(random_plane(h, w, seed ^ 1), random_plane(h, w, seed ^ 2)).unwrap();
                let ga = grad(&a);
                let lhs = inner(&ga.gx, &g.gx) + inner(&ga.gy, &g.gy);
                let rhs = inner(&a, &div(&g));
                let na = inner(&a, &a).sqrt();
                let ng = (inner(&g.gx, &g.gx) + inner(&g.gy, &g.gy)).sqrt();
                prop_assert!((lhs + rhs).abs() < 1e-10 * na * ng);
            }

            #[test]
            fn sparsification_is_monotone(seed in any::<u64>(), h1 in 0.0f64..1.0, h2 in 0.0f64..1.0, joint in any::<bool>()) {
                let mode = if joint { NormMode::JointChannel } else { NormMode::PerChannel };
                let fields = [field(seed), field(seed.wrapping_add(1)), field(seed.wrapping_add(2))];
                let (lo, hi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
                let count = |h: f64| -> usize {
                    threshold_gradient(&fields, &ThresholdParams::new(h, mode).unwrap())
                        .unwrap()
                        .iter()
                        .map(GradientField::nonzero_count)
                        .sum()
                };
                prop_assert!(count(hi) <= count(lo));
            }

            #[test]
            fn threshold_is_idempotent(seed in any::<u64>(), h in 0.0f64..1.0, joint in any::<bool>()) {
                let mode = if joint { NormMode::JointChannel } else { NormMode::PerChannel };
                let p = ThresholdParams::new(h, mode).unwrap();
                let fields = [field(seed), field(seed.wrapping_add(7)), field(seed.wrapping_add(9))];
                let once = threshold_gradient(&fields, &p).unwrap();
                let twice = threshold_gradient(&once, &p).unwrap();
                prop_assert_eq!(once, twice);
            }
        }
    }
}
