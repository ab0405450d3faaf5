//! Independent oracles for the integration and acceptance suites.

#![allow(dead_code, clippy::needless_range_loop)]

use dereflect_core::{ImagePlane, ImageTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_plane(height: usize, width: usize, seed: u64) -> ImagePlane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImagePlane::from_fn(height, width, |_, _| rng.random::<f64>()).unwrap()
}

pub fn random_rgb(height: usize, width: usize, seed: u64) -> ImageTensor {
    ImageTensor::rgb(
        random_plane(height, width, seed),
        random_plane(height, width, seed.wrapping_add(1)),
        random_plane(height, width, seed.wrapping_add(2)),
    )
    .unwrap()
}

/// Five-point mirror-boundary Laplacian assembled entry by entry.
pub fn dense_laplacian(height: usize, width: usize) -> Vec<Vec<f64>> {
    let n = height * width;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..height {
        for j in 0..width {
            let p = i * width + j;
            let mut link = |q: usize| {
                a[p][q] += 1.0;
                a[p][p] -= 1.0;
            };
            if i > 0 {
                link(p - width);
            }
            if i + 1 < height {
                link(p + width);
            }
            if j > 0 {
                link(p - 1);
            }
            if j + 1 < width {
                link(p + 1);
            }
        }
    }
    a
}

/// `sum_{i,j} a[i,j] cos(pi k (2i+1)/2M) cos(pi l (2j+1)/2N)`
pub fn naive_dct2(a: &ImagePlane) -> ImagePlane {
    let (m, n) = a.dims();
    let pi = std::f64::consts::PI;
    ImagePlane::from_fn(m, n, |k, l| {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..n {
                s += a.get(i, j)
                    * (pi * (k * (2 * i + 1)) as f64 / (2 * m) as f64).cos()
                    * (pi * (l * (2 * j + 1)) as f64 / (2 * n) as f64).cos();
            }
        }
        s
    })
    .unwrap()
}

pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Dense `(A^2 + eps I) x = p`. The constant mode (exact null vector of `A`)
/// is handled analytically; the remainder goes through the well-conditioned
/// `A^2 + eps I + 11^T / n`.
pub fn dense_screened(height: usize, width: usize, eps: f64, p: &[f64]) -> Vec<f64> {
    let n = height * width;
    let a = dense_laplacian(height, width);
    let mut sys = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    sys[i][j] += a[i][k] * a[k][j];
                }
            }
        }
        sys[i][i] += eps;
        for v in sys[i].iter_mut() {
            *v += 1.0 / n as f64;
        }
    }
    let mean = p.iter().sum::<f64>() / n as f64;
    let centered = p.iter().map(|v| v - mean).collect();
    gauss_solve(sys, centered).into_iter().map(|x| x + mean / eps).collect()
}

/// Zero-mean random part plus `eps` times an image: the scale of right-hand
/// sides the suppression pipeline produces.
pub fn pipeline_scale_rhs(height: usize, width: usize, eps: f64, seed: u64) -> ImagePlane {
    let u = random_plane(height, width, seed);
    let y = random_plane(height, width, seed ^ 0xabcdef);
    let m = u.mean();
    u.zip_map(&y, |u, y| u - m + eps * y).unwrap()
}
