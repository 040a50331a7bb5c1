//! Discrete Fourier transforms on square periodic grids.
//!
//! Normalization is the analyst convention `f^(xi) = int exp(-i x.xi) f(x) dx` with
//! inverse `f(x) = (2 pi)^-d int exp(i x.xi) f^(xi) dxi`. On a box `[-L/2, L/2)^d`
//! with `n` points per axis this becomes
//!
//! ```text
//! f^(xi_k) = (L/n)^d sum_j exp(-i xi_k x_j) f(x_j)
//! f(x_j)   = L^-d    sum_k exp( i xi_k x_j) f^(xi_k)
//! ```
//!
//! so Parseval reads `||f||_2^2 = L^-d sum_k |f^(xi_k)|^2`. The `(-1)^k` factors
//! come from the box being centered at the origin.
//!
//! Solvers work with raw (unnormalized, origin-at-index-0) DFT coefficients through
//! [`FftPlan`]; only the public [`Fourier`] API applies the analyst normalization.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::{Field, Spectrum};
use crate::grid::Grid;

/// Forward and inverse unnormalized FFTs for a `size^dim` row-major array.
///
/// Plans are immutable and shareable across threads; scratch space is allocated
/// per call.
#[derive(Clone)]
pub struct FftPlan {
    dim: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan")
            .field("dim", &self.dim)
            .field("size", &self.size)
            .finish()
    }
}

impl FftPlan {
    pub fn new(dim: usize, size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        Self::new(grid.dim(), grid.n())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Total array length `size^dim`.
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// In-place `X_k = sum_j x_j exp(-2 pi i j k / size)` along every axis.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(&self.forward, buf);
    }

    /// In-place `x_j = sum_k X_k exp(2 pi i j k / size)` along every axis (no 1/size).
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(&self.inverse, buf);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len(), "buffer length does not match plan");
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(buf, &mut scratch);
        if self.dim == 2 {
            let mut t = transpose(buf, self.size);
            fft.process_with_scratch(&mut t, &mut scratch);
            let back = transpose(&t, self.size);
            buf.copy_from_slice(&back);
        }
    }
}

fn transpose(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

/// `(-1)^k` for the FFT-ordered flat index (product over axes).
fn centering_sign(grid: &Grid, idx: usize) -> f64 {
    let n = grid.n();
    let parity = match grid.dim() {
        1 => idx % 2,
        _ => (idx / n + idx % n) % 2,
    };
    if parity == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Analyst-normalized transforms between [`Field`] and [`Spectrum`] on one grid.
#[derive(Debug, Clone)]
pub struct Fourier {
    grid: Grid,
    plan: FftPlan,
}

impl Fourier {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: *grid,
            plan: FftPlan::for_grid(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn plan(&self) -> &FftPlan {
        &self.plan
    }

    pub fn to_frequency(&self, f: &Field) -> Spectrum {
        assert_eq!(*f.grid(), self.grid, "grid mismatch");
        let mut buf = f.values().to_vec();
        self.plan.forward(&mut buf);
        let w = self.grid.cell_volume();
        for (i, z) in buf.iter_mut().enumerate() {
            *z *= w * centering_sign(&self.grid, i);
        }
        Spectrum::from_raw(self.grid, buf)
    }

    pub fn to_physical(&self, s: &Spectrum) -> Field {
        assert_eq!(*s.grid(), self.grid, "grid mismatch");
        let w = self.grid.box_length().powi(self.grid.dim() as i32).recip();
        let mut buf: Vec<Complex64> = s
            .values()
            .iter()
            .enumerate()
            .map(|(i, z)| z * (w * centering_sign(&self.grid, i)))
            .collect();
        self.plan.inverse(&mut buf);
        Field::from_raw(self.grid, buf)
    }

    /// Raw DFT coefficients (no centering phase, no weight).
    pub(crate) fn raw_forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.plan.forward(&mut buf);
        buf
    }

    /// Inverse of [`Fourier::raw_forward`], including the `1/n^d` factor.
    pub(crate) fn raw_inverse(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        self.plan.inverse(&mut buf);
        let s = (self.grid.len() as f64).recip();
        for z in buf.iter_mut() {
            *z *= s;
        }
        buf
    }
}

/// One-off forward transform; builds a plan per call.
pub fn to_frequency(f: &Field) -> Spectrum {
    Fourier::new(f.grid()).to_frequency(f)
}

/// One-off inverse transform; builds a plan per call.
pub fn to_physical(s: &Spectrum) -> Field {
    Fourier::new(s.grid()).to_physical(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::new(grid, v).unwrap()
    }

    #[test]
    fn constant_field_is_pure_dc() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let s = to_frequency(&f);
        assert!((s.values()[0] - Complex64::new(2.0 * PI, 0.0)).norm() < 1e-13);
        for z in &s.values()[1..] {
            assert!(z.norm() < 1e-13);
        }
    }

    #[test]
    fn round_trip_1d_and_2d() {
        for (dim, n) in [(1, 256), (2, 32)] {
            let g = Grid::new(dim, n, 7.3).unwrap();
            let f = random_field(g, 11);
            let back = to_physical(&to_frequency(&f));
            let err = f
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-13, "dim {dim}: {err}");
        }
    }

    #[test]
    fn parseval_with_documented_scaling() {
        for (dim, n) in [(1, 128), (2, 32)] {
            let g = Grid::new(dim, n, 11.0).unwrap();
            let f = random_field(g, 3);
            let lhs: f64 = f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.cell_volume();
            let s = to_frequency(&f);
            let rhs: f64 = s.values().iter().map(|z| z.norm_sqr()).sum::<f64>()
                / g.box_length().powi(dim as i32);
            assert!(((lhs - rhs) / lhs).abs() < 1e-12);
        }
    }

    /// Independent oracle: direct midpoint quadrature of the Fourier integral at a few
    /// frequencies, compared with both the closed form and the FFT path.
    #[test]
    fn gaussian_transform_matches_closed_form_and_quadrature() {
        let g = Grid::new(1, 512, 40.0).unwrap();
        let f = Field::gaussian(g, 1.0, 1.0);
        let s = to_frequency(&f);
        let xi = g.fft_frequencies();
        for m in [0usize, 3, 17, 40, 100] {
            let exact = (2.0 * PI).sqrt() * (-0.5 * xi[m] * xi[m]).exp();
            assert!((s.values()[m].re - exact).abs() < 1e-12, "m={m}");
            assert!(s.values()[m].im.abs() < 1e-12);
            // 20000-panel midpoint rule on [-20, 20]
            let panels = 20_000;
            let h = 40.0 / panels as f64;
            let quad: Complex64 = (0..panels)
                .map(|p| {
                    let x = -20.0 + (p as f64 + 0.5) * h;
                    Complex64::from_polar((-0.5 * x * x).exp() * h, -xi[m] * x)
                })
                .sum();
            assert!((quad.re - exact).abs() < 1e-9, "quadrature m={m}");
        }
    }
}
