//! Periodic spatial grids standing in for the whole space.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A periodic box `[-L/2, L/2)^dim` sampled with `n` points per axis.
///
/// Frequencies are `xi_j = 2 pi j / L` for integer `j` in `[-n/2, n/2)`.
/// Internally everything is stored in FFT order (non-negative modes first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidDimension(dim));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidBoxLength(box_length));
        }
        Ok(Self { dim, n, box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Quadrature weight of one grid cell, `(L/n)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Frequency spacing `2 pi / L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn nyquist(&self) -> f64 {
        self.dxi() * (self.n / 2) as f64
    }

    /// Signed integer wavenumber of FFT-ordered index `m`.
    pub fn wavenumber(&self, m: usize) -> i64 {
        let half = (self.n / 2) as i64;
        let m = m as i64;
        if m < half {
            m
        } else {
            m - self.n as i64
        }
    }

    /// FFT-ordered index of signed wavenumber `k`; `None` if unresolved.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Per-axis frequencies in ascending order, `-n/2 .. n/2 - 1` times `2 pi / L`.
    pub fn frequencies(&self) -> Vec<f64> {
        let half = (self.n / 2) as i64;
        (-half..half).map(|j| j as f64 * self.dxi()).collect()
    }

    /// Per-axis frequencies in FFT order.
    pub fn fft_frequencies(&self) -> Vec<f64> {
        (0..self.n)
            .map(|m| self.wavenumber(m) as f64 * self.dxi())
            .collect()
    }

    /// Per-axis physical coordinates `-L/2 + j L / n`.
    pub fn coordinates(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n)
            .map(|j| -0.5 * self.box_length + j as f64 * dx)
            .collect()
    }

    /// `|xi|^2` at every point of the frequency grid, FFT order, row-major.
    pub fn xi_squared(&self) -> Vec<f64> {
        let axis: Vec<f64> = self.fft_frequencies().iter().map(|x| x * x).collect();
        match self.dim {
            1 => axis,
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for a in &axis {
                    for b in &axis {
                        out.push(a + b);
                    }
                }
                out
            }
        }
    }

    /// Physical position of the flat index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let dx = self.dx();
        let h = -0.5 * self.box_length;
        match self.dim {
            1 => [h + idx as f64 * dx, 0.0],
            _ => {
                let (i, j) = (idx / self.n, idx % self.n);
                [h + i as f64 * dx, h + j as f64 * dx]
            }
        }
    }

    /// Largest dyadic level whose cutoff is fully resolved: `n pi / (2L)` rounded down
    /// to a power of two. `None` when that is below 1.
    pub fn max_dyadic_level(&self) -> Option<u32> {
        let top = self.n as f64 * PI / (2.0 * self.box_length);
        if top < 1.0 {
            return None;
        }
        let exp = top.log2().floor() as u32;
        // guard against log2 landing a hair above an exact power
        let mut level = 1u32 << exp.min(31);
        while level as f64 > top {
            level >>= 1;
        }
        Some(level)
    }
}

pub fn make_grid(dim: usize, n: usize, box_length: f64) -> Result<Grid> {
    Grid::new(dim, n, box_length)
}
