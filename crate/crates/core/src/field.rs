//! Complex fields sampled on a [`Grid`], in physical and frequency representation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex amplitude per grid point (physical space), optionally time-stamped.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    time: Option<f64>,
}

impl Field {
    /// Builds a field, rejecting wrong lengths and non-finite entries.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if !values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            grid,
            values,
            time: None,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            time: None,
        }
    }

    /// Samples `f` at every grid position (`x[1]` is zero in one dimension).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self {
            grid,
            values,
            time: None,
        }
    }

    /// Centered Gaussian `amplitude * exp(-|x|^2 / (2 width^2))`.
    pub fn gaussian(grid: Grid, width: f64, amplitude: f64) -> Self {
        let s = 0.5 / (width * width);
        Self::from_fn(grid, |x| {
            Complex64::new(amplitude * (-(x[0] * x[0] + x[1] * x[1]) * s).exp(), 0.0)
        })
    }

    /// Plane wave `amplitude * exp(i k . x)` with integer wavenumbers `k`.
    pub fn plane_wave(grid: Grid, k: [i64; 2], amplitude: Complex64) -> Self {
        let dxi = grid.dxi();
        Self::from_fn(grid, |x| {
            let phase = dxi * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
            amplitude * Complex64::from_polar(1.0, phase)
        })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            values,
            time: None,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn set_time(&mut self, t: Option<f64>) {
        self.time = t;
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let values = self.values.iter().map(|z| z * c).collect();
        Field {
            grid: self.grid,
            values,
            time: self.time,
        }
    }

    /// `self - other`, pointwise. Panics on grid mismatch.
    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Field::from_raw(self.grid, values)
    }

    /// `self + other`, pointwise. Panics on grid mismatch.
    pub fn add(&self, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Field::from_raw(self.grid, values)
    }

    /// L2 inner product `<self, other> = int self * conj(other) dx`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * self.grid.cell_volume()
    }

    /// Cyclic shift by whole grid cells along each axis.
    pub fn roll(&self, shift: [i64; 2]) -> Field {
        let n = self.grid.n() as i64;
        let wrap = |i: i64| (((i % n) + n) % n) as usize;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        match self.grid.dim() {
            1 => {
                for (i, v) in self.values.iter().enumerate() {
                    values[wrap(i as i64 + shift[0])] = *v;
                }
            }
            _ => {
                let nu = n as usize;
                for i in 0..nu {
                    for j in 0..nu {
                        let (a, b) = (wrap(i as i64 + shift[0]), wrap(j as i64 + shift[1]));
                        values[a * nu + b] = self.values[i * nu + j];
                    }
                }
            }
        }
        Field {
            grid: self.grid,
            values,
            time: self.time,
        }
    }
}

/// Frequency-side samples `f^(xi)` at the grid frequencies, FFT order, row-major.
///
/// Normalization follows `f^(xi) = int exp(-i x.xi) f(x) dx`, discretized with the
/// cell weight `(L/n)^dim`; see [`crate::fourier`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at signed integer wavenumbers `k` (second entry ignored in 1D).
    pub fn at(&self, k: [i64; 2]) -> Option<Complex64> {
        let i = self.grid.index_of(k[0])?;
        match self.grid.dim() {
            1 => Some(self.values[i]),
            _ => {
                let j = self.grid.index_of(k[1])?;
                Some(self.values[i * self.grid.n() + j])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 16];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(Field::new(g, v), Err(Error::NonFinite));
    }

    #[test]
    fn rejects_wrong_length() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let v = vec![Complex64::new(0.0, 0.0); 15];
        assert_eq!(
            Field::new(g, v),
            Err(Error::LengthMismatch {
                expected: 16,
                got: 15
            })
        );
    }

    #[test]
    fn roll_2d_moves_indices() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0], x[1]));
        let r = f.roll([1, -2]);
        assert_eq!(r.values()[16 + 14], f.values()[0]);
    }
}
