//! Linear Strichartz ratios over a finite, symmetric time window.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::{l2, trapezoid};
use crate::propagator::FreePropagator;

/// Uniform time samples on `[-T, T]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub half_width: f64,
    pub samples: usize,
}

impl TimeWindow {
    pub const MIN_SAMPLES: usize = 16;

    pub fn new(half_width: f64, samples: usize) -> Result<Self> {
        let w = Self {
            half_width,
            samples,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "half_width",
                value: self.half_width,
                reason: "time window must be positive and finite",
            });
        }
        if self.samples < Self::MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                needed: Self::MIN_SAMPLES,
                got: self.samples,
            });
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let m = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|j| -self.half_width + 2.0 * self.half_width * j as f64 / m)
            .collect()
    }
}

/// Checks `2/q = d (1/2 - 1/r)` with `2 <= q, r <= inf`, excluding `(d, q, r) = (2, 2, inf)`.
pub fn check_admissible(q: f64, r: f64, dim: usize) -> Result<()> {
    let err = Error::Inadmissible { q, r, dim };
    if q.is_nan() || r.is_nan() || q < 2.0 || r < 2.0 || !(dim == 1 || dim == 2) {
        return Err(err);
    }
    let lhs = 2.0 / q;
    let rhs = dim as f64 * (0.5 - 1.0 / r);
    if (lhs - rhs).abs() > 1e-12 || (dim == 2 && q == 2.0) {
        return Err(err);
    }
    Ok(())
}

/// `||exp(i d_av t Delta) f||_{L^q_t L^r_x([-T, T])} / ||f||_2`, zero for `f = 0`.
pub fn strichartz_ratio(f: &Field, q: f64, r: f64, window: &TimeWindow, d_av: f64) -> Result<f64> {
    check_admissible(q, r, f.grid().dim())?;
    window.validate()?;
    let norm = l2(f);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let grid = *f.grid();
    let prop = FreePropagator::new(&grid);
    let fourier = prop.fourier();
    let c0 = fourier.raw_forward(f.values());
    let times = window.times();
    let spatial: Vec<f64> = times
        .iter()
        .map(|&t| {
            let mut c = c0.clone();
            prop.apply_raw(&mut c, d_av * t);
            let v = fourier.raw_inverse(c);
            lp_of_values(&v, r, grid.cell_volume())
        })
        .collect();
    let value = if q.is_infinite() {
        spatial.iter().copied().fold(0.0, f64::max)
    } else {
        let powered: Vec<f64> = spatial.iter().map(|a| a.powf(q)).collect();
        trapezoid(&times, &powered).powf(1.0 / q)
    };
    Ok(value / norm)
}

pub(crate) fn lp_of_values(v: &[num_complex::Complex64], r: f64, cell: f64) -> f64 {
    if r.is_infinite() {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        (v.iter().map(|z| z.norm().powf(r)).sum::<f64>() * cell).powf(1.0 / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64;

    #[test]
    fn admissible_pairs() {
        assert!(check_admissible(6.0, 6.0, 1).is_ok());
        assert!(check_admissible(4.0, f64::INFINITY, 1).is_ok());
        assert!(check_admissible(f64::INFINITY, 2.0, 1).is_ok());
        assert!(check_admissible(4.0, 4.0, 2).is_ok());
        assert!(check_admissible(2.0, f64::INFINITY, 2).is_err());
        assert!(check_admissible(4.0, 4.0, 1).is_err());
        let msg = check_admissible(3.0, 3.0, 1).unwrap_err().to_string();
        assert!(msg.contains("2/q"), "{msg}");
    }

    #[test]
    fn zero_data_and_short_window() {
        let g = Grid::new(1, 64, 20.0).unwrap();
        let w = TimeWindow::new(1.0, 32).unwrap();
        assert_eq!(
            strichartz_ratio(&Field::zeros(g), 6.0, 6.0, &w, 1.0).unwrap(),
            0.0
        );
        assert!(TimeWindow::new(1.0, 8).is_err());
        assert!(TimeWindow::new(0.0, 32).is_err());
    }

    #[test]
    fn plane_wave_has_closed_form() {
        // constant modulus |A|: ||.||_{L^q L^r} = |A| L^{d/r} (2T)^{1/q}, ||f||_2 = |A| L^{d/2}
        let l = 10.0;
        let g = Grid::new(2, 32, l).unwrap();
        let f = Field::plane_wave(g, [3, -2], Complex64::new(0.3, 0.4));
        let w = TimeWindow::new(0.7, 17).unwrap();
        let got = strichartz_ratio(&f, 4.0, 4.0, &w, 1.0).unwrap();
        let want = l.powf(2.0 / 4.0) * 1.4f64.powf(0.25) / l;
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn refinement_stability() {
        let ratio = |n: usize| {
            let g = Grid::new(1, n, 40.0).unwrap();
            let f = Field::from_fn(g, |x| {
                Complex64::new((-x[0] * x[0]).exp(), 0.0) * Complex64::from_polar(1.0, 1.5 * x[0])
            });
            strichartz_ratio(&f, 6.0, 6.0, &TimeWindow::new(1.0, 257).unwrap(), 1.0).unwrap()
        };
        let a = ratio(256);
        let b = ratio(512);
        assert!(a.is_finite() && a > 0.0);
        assert!((a - b).abs() < 1e-10 * a);
    }
}
