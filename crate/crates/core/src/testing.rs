//! Oracles and fixtures shared by unit tests. Nothing here calls the code
//! paths it is used to check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::ImagePlane;

pub fn random_plane(height: usize, width: usize, seed: u64) -> ImagePlane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImagePlane::from_fn(height, width, |_, _| rng.random::<f64>()).unwrap()
}

/// Row-major dense matrix of the five-point Laplacian with mirror boundary:
/// every existing 4-neighbour contributes +1 off the diagonal and -1 on it.
pub fn dense_neumann_laplacian(height: usize, width: usize) -> Vec<Vec<f64>> {
    let n = height * width;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..height {
        for j in 0..width {
            let p = i * width + j;
            let mut neighbours = Vec::new();
            if i > 0 {
                neighbours.push(p - width);
            }
            if i + 1 < height {
                neighbours.push(p + width);
            }
            if j > 0 {
                neighbours.push(p - 1);
            }
            if j + 1 < width {
                neighbours.push(p + 1);
            }
            for q in neighbours {
                a[p][q] += 1.0;
                a[p][p] -= 1.0;
            }
        }
    }
    a
}

/// Direct O((MN)^2) unnormalized 2-D DCT-II:
/// `X[k,l] = sum_{i,j} x[i,j] cos(pi k (2i+1) / 2M) cos(pi l (2j+1) / 2N)`.
pub fn naive_dct2(a: &ImagePlane) -> ImagePlane {
    let (m, n) = a.dims();
    let pi = std::f64::consts::PI;
    ImagePlane::from_fn(m, n, |k, l| {
        let mut s = 0.0;
        for i in 0..m {
            let ci = (pi * k as f64 * (2 * i + 1) as f64 / (2 * m) as f64).cos();
            for j in 0..n {
                let cj = (pi * l as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos();
                s += a.get(i, j) * ci * cj;
            }
        }
        s
    })
    .unwrap()
}

/// Gaussian elimination with partial pivoting on a dense system.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t] != 0.0 {
                for j in 0..m {
                    out[i][j] += a[i][t] * b[t][j];
                }
            }
        }
    }
    out
}

/// Dense solve of `(A^2 + eps I) x = p` with `A` the mirror-boundary
/// Laplacian. The constant vector is an exact null vector of `A`, so its
/// component is solved analytically (`mean(p) / eps`) and the rest through the
/// well-conditioned `A^2 + eps I + 11^T / n`.
pub fn dense_screened_solve(height: usize, width: usize, eps: f64, p: &[f64]) -> Vec<f64> {
    let n = height * width;
    let a = dense_neumann_laplacian(height, width);
    let mut sys = mat_mul(&a, &a);
    for (i, row) in sys.iter_mut().enumerate() {
        row[i] += eps;
        for v in row.iter_mut() {
            *v += 1.0 / n as f64;
        }
    }
    let mean = p.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = p.iter().map(|v| v - mean).collect();
    dense_solve(sys, centered).into_iter().map(|x| x + mean / eps).collect()
}

/// Random right-hand side at the scale the pipeline produces: an arbitrary
/// zero-mean part plus `eps` times an image in `[0, 1)`.
pub fn realistic_rhs(height: usize, width: usize, eps: f64, seed: u64) -> ImagePlane {
    let u = random_plane(height, width, seed);
    let y = random_plane(height, width, seed ^ 0x9e37_79b9);
    let mean = u.mean();
    u.zip_map(&y, |u, y| (u - mean) + eps * y).unwrap()
}
