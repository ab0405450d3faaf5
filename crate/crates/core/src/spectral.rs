//! DCT-II transforms and the spectral Neumann solvers.
//!
//! The forward transform is the unnormalized DCT-II
//! `X[k] = sum_i x[i] cos(pi k (2i + 1) / 2N)` applied along both axes, and
//! the inverse is its exact inverse. Because the mirror-boundary Laplacian
//! from [`crate::diff`] is diagonal in this basis,
//! `dct2(laplacian(a)) = K . dct2(a)` with
//! `K[m, n] = 2 (cos(m pi / M) + cos(n pi / N) - 2)`.
//!
//! Each 1-D transform is one complex FFT of length `N` (Makhoul's even/odd
//! reordering), so arbitrary sizes run in `O(N log N)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::tensor::ImagePlane;

/// 1-D DCT-II / inverse pair of fixed length.
struct Dct1d {
    len: usize,
    forward_fft: Arc<dyn Fft<f64>>,
    inverse_fft: Arc<dyn Fft<f64>>,
    /// `exp(i pi k / 2N)` for `k < N`.
    twiddles: Vec<Complex<f64>>,
    scratch_len: usize,
}

struct Workspace {
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Dct1d {
    fn new(len: usize, planner: &mut FftPlanner<f64>) -> Self {
        let forward_fft = planner.plan_fft_forward(len);
        let inverse_fft = planner.plan_fft_inverse(len);
        let scratch_len = forward_fft
            .get_inplace_scratch_len()
            .max(inverse_fft.get_inplace_scratch_len());
        let twiddles = (0..len)
            .map(|k| Complex::from_polar(1.0, PI * k as f64 / (2 * len) as f64))
            .collect();
        Self {
            len,
            forward_fft,
            inverse_fft,
            twiddles,
            scratch_len,
        }
    }

    fn workspace(&self) -> Workspace {
        Workspace {
            buf: vec![Complex::default(); self.len],
            scratch: vec![Complex::default(); self.scratch_len],
        }
    }

    fn forward(&self, data: &mut [f64], ws: &mut Workspace) {
        let n = self.len;
        let buf = &mut ws.buf;
        for k in 0..n.div_ceil(2) {
            buf[k] = Complex::new(data[2 * k], 0.0);
        }
        for k in 0..n / 2 {
            buf[n - 1 - k] = Complex::new(data[2 * k + 1], 0.0);
        }
        self.forward_fft.process_with_scratch(buf, &mut ws.scratch);
        for ((out, v), w) in data.iter_mut().zip(buf.iter()).zip(&self.twiddles) {
            // Re(conj(w) * v)
            *out = v.re * w.re + v.im * w.im;
        }
    }

    fn inverse(&self, data: &mut [f64], ws: &mut Workspace) {
        let n = self.len;
        let buf = &mut ws.buf;
        buf[0] = Complex::new(data[0], 0.0);
        for k in 1..n {
            buf[k] = self.twiddles[k] * Complex::new(data[k], -data[n - k]);
        }
        self.inverse_fft.process_with_scratch(buf, &mut ws.scratch);
        let scale = 1.0 / n as f64;
        for k in 0..n.div_ceil(2) {
            data[2 * k] = buf[k].re * scale;
        }
        for k in 0..n / 2 {
            data[2 * k + 1] = buf[n - 1 - k].re * scale;
        }
    }

    /// Forward transform of two real rows with a single complex FFT: `a` rides
    /// in the real part, `b` in the imaginary part, and the two spectra are
    /// separated using the Hermitian symmetry of real-input FFTs.
    fn forward_pair(&self, a: &mut [f64], b: &mut [f64], ws: &mut Workspace) {
        let n = self.len;
        let buf = &mut ws.buf;
        for k in 0..n.div_ceil(2) {
            buf[k] = Complex::new(a[2 * k], b[2 * k]);
        }
        for k in 0..n / 2 {
            buf[n - 1 - k] = Complex::new(a[2 * k + 1], b[2 * k + 1]);
        }
        self.forward_fft.process_with_scratch(buf, &mut ws.scratch);
        for k in 0..n {
            let z = buf[k];
            let zc = buf[(n - k) % n].conj();
            // A = (z + zc) / 2, B = (z - zc) / 2i
            let va = Complex::new(0.5 * (z.re + zc.re), 0.5 * (z.im + zc.im));
            let vb = Complex::new(0.5 * (z.im - zc.im), -0.5 * (z.re - zc.re));
            let w = self.twiddles[k];
            a[k] = va.re * w.re + va.im * w.im;
            b[k] = vb.re * w.re + vb.im * w.im;
        }
    }

    /// Inverse of two real rows with a single complex FFT. Both intermediate
    /// spectra are Hermitian, so packing `A + iB` yields `a` and `b` as the
    /// real and imaginary parts of the result.
    fn inverse_pair(&self, a: &mut [f64], b: &mut [f64], ws: &mut Workspace) {
        let n = self.len;
        let buf = &mut ws.buf;
        buf[0] = Complex::new(a[0], b[0]);
        for k in 1..n {
            let w = self.twiddles[k];
            let va = w * Complex::new(a[k], -a[n - k]);
            let vb = w * Complex::new(b[k], -b[n - k]);
            buf[k] = Complex::new(va.re - vb.im, va.im + vb.re);
        }
        self.inverse_fft.process_with_scratch(buf, &mut ws.scratch);
        let scale = 1.0 / n as f64;
        for k in 0..n.div_ceil(2) {
            a[2 * k] = buf[k].re * scale;
            b[2 * k] = buf[k].im * scale;
        }
        for k in 0..n / 2 {
            a[2 * k + 1] = buf[n - 1 - k].re * scale;
            b[2 * k + 1] = buf[n - 1 - k].im * scale;
        }
    }
}

/// Separable 2-D DCT-II plan for a fixed `height x width` grid.
///
/// Plans are immutable and can be shared between threads.
pub struct Dct2d {
    height: usize,
    width: usize,
    rows: Dct1d,
    cols: Dct1d,
}

impl Dct2d {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyDimensions { height, width });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            height,
            width,
            rows: Dct1d::new(width, &mut planner),
            cols: Dct1d::new(height, &mut planner),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn forward(&self, a: &ImagePlane) -> Result<ImagePlane> {
        self.run(a, Direction::Forward)
    }

    pub fn inverse(&self, s: &ImagePlane) -> Result<ImagePlane> {
        self.run(s, Direction::Inverse)
    }

    fn run(&self, a: &ImagePlane, dir: Direction) -> Result<ImagePlane> {
        self.check(a)?;
        let (h, w) = (self.height, self.width);
        let mut data = a.as_slice().to_vec();
        apply_rows(&self.rows, &mut data, dir);
        let mut t = vec![0.0; h * w];
        transpose::transpose(&data, &mut t, w, h);
        apply_rows(&self.cols, &mut t, dir);
        transpose::transpose(&t, &mut data, h, w);
        ImagePlane::new(h, w, data)
    }

    fn check(&self, a: &ImagePlane) -> Result<()> {
        if a.dims() != (self.height, self.width) {
            return Err(Error::ShapeMismatch {
                expected: (self.height, self.width, 1),
                actual: (a.height(), a.width(), 1),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

/// Transforms every row of `data`. Rows are processed two per FFT; pairing
/// depends only on the row index, so results do not depend on scheduling.
fn apply_rows(plan: &Dct1d, data: &mut [f64], dir: Direction) {
    let n = plan.len;
    data.par_chunks_mut(2 * n).for_each_init(
        || plan.workspace(),
        |ws, chunk| {
            if chunk.len() == 2 * n {
                let (a, b) = chunk.split_at_mut(n);
                match dir {
                    Direction::Forward => plan.forward_pair(a, b, ws),
                    Direction::Inverse => plan.inverse_pair(a, b, ws),
                }
            } else {
                match dir {
                    Direction::Forward => plan.forward(chunk, ws),
                    Direction::Inverse => plan.inverse(chunk, ws),
                }
            }
        },
    );
}

/// Eigenvalues of the mirror-boundary Laplacian in the DCT-II basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralKernel {
    values: ImagePlane,
}

impl SpectralKernel {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        let cm: Vec<f64> = (0..height).map(|m| (m as f64 * PI / height as f64).cos()).collect();
        let cn: Vec<f64> = (0..width).map(|n| (n as f64 * PI / width as f64).cos()).collect();
        let values = ImagePlane::from_fn(height, width, |m, n| 2.0 * (cm[m] + cn[n] - 2.0))?;
        Ok(Self { values })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    pub fn values(&self) -> &ImagePlane {
        &self.values
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values.get(m, n)
    }
}

/// Screening weight of the fourth-order solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    epsilon: f64,
}

impl SolverParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// DCT plans plus kernel for one grid size.
pub struct SpectralSolver {
    dct: Dct2d,
    kernel: SpectralKernel,
}

const CACHE_CAPACITY: usize = 16;

impl SpectralSolver {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        Ok(Self {
            dct: Dct2d::new(height, width)?,
            kernel: SpectralKernel::new(height, width)?,
        })
    }

    /// Process-wide solver for `(height, width)`, built on first use.
    pub fn shared(height: usize, width: usize) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<SpectralSolver>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.lock().unwrap().get(&(height, width)) {
            return Ok(Arc::clone(s));
        }
        // Built outside the lock; a racing thread may build the same plan, and
        // either copy is equivalent.
        let solver = Arc::new(Self::new(height, width)?);
        let mut map = cache.lock().unwrap();
        if map.len() >= CACHE_CAPACITY {
            map.clear();
        }
        Ok(Arc::clone(map.entry((height, width)).or_insert(solver)))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dct.dims()
    }

    pub fn kernel(&self) -> &SpectralKernel {
        &self.kernel
    }

    pub fn dct(&self) -> &Dct2d {
        &self.dct
    }

    /// Solves `(L^2 + eps) T = p` by dividing the spectrum by `K^2 + eps`.
    pub fn solve_screened(&self, p: &ImagePlane, params: &SolverParams) -> Result<ImagePlane> {
        let eps = params.epsilon;
        let mut spec = self.dct.forward(p)?;
        for (s, &k) in spec.as_mut_slice().iter_mut().zip(self.kernel.values.as_slice()) {
            *s /= k * k + eps;
        }
        self.dct.inverse(&spec)
    }

    /// Solves `L T = f` with the zero-mean convention for the free constant.
    ///
    /// `f` must have (numerically) zero pixel sum.
    pub fn solve_poisson(&self, f: &ImagePlane) -> Result<ImagePlane> {
        let sum = f.sum();
        let l1: f64 = f.as_slice().iter().map(|v| v.abs()).sum();
        let tolerance = 1e-8 * l1;
        if sum.abs() > tolerance {
            return Err(Error::InfeasibleRhs { sum, tolerance });
        }
        let mut spec = self.dct.forward(f)?;
        let k = self.kernel.values.as_slice();
        let s = spec.as_mut_slice();
        s[0] = 0.0;
        for i in 1..s.len() {
            s[i] /= k[i];
        }
        self.dct.inverse(&spec)
    }
}

pub fn dct2(a: &ImagePlane) -> ImagePlane {
    let (h, w) = a.dims();
    SpectralSolver::shared(h, w)
        .and_then(|s| s.dct.forward(a))
        .expect("plan dimensions match the input")
}

pub fn idct2(s: &ImagePlane) -> ImagePlane {
    let (h, w) = s.dims();
    SpectralSolver::shared(h, w)
        .and_then(|solver| solver.dct.inverse(s))
        .expect("plan dimensions match the input")
}

pub fn solve_poisson(f: &ImagePlane) -> Result<ImagePlane> {
    SpectralSolver::shared(f.height(), f.width())?.solve_poisson(f)
}

pub fn solve_screened_biharmonic(p: &ImagePlane, params: &SolverParams) -> Result<ImagePlane> {
    SpectralSolver::shared(p.height(), p.width())?.solve_screened(p, params)
}
