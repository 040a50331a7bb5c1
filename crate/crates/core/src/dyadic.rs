//! Littlewood–Paley cutoffs and dyadic frequency projections.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fourier::Fourier;
use crate::grid::Grid;

fn bump_tail(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, `C^inf` in between.
fn smooth_step(t: f64) -> f64 {
    let a = bump_tail(t);
    let b = bump_tail(1.0 - t);
    a / (a + b)
}

/// Base cutoff: 1 for `|xi| <= 1`, 0 for `|xi| >= 2`.
pub fn rho(xi_abs: f64) -> f64 {
    1.0 - smooth_step(xi_abs - 1.0)
}

/// Cutoff of dyadic level `level`: `rho` at level 1, `rho(xi/N) - rho(2 xi/N)` above.
pub fn rho_level(level: u32, xi_abs: f64) -> f64 {
    if level <= 1 {
        rho(xi_abs)
    } else {
        let n = level as f64;
        rho(xi_abs / n) - rho(2.0 * xi_abs / n)
    }
}

/// Dyadic levels `1, 2, 4, ..., N_max` with their cutoffs sampled on a grid.
#[derive(Debug, Clone)]
pub struct DyadicLadder {
    grid: Grid,
    levels: Vec<u32>,
    cutoffs: Vec<Vec<f64>>,
    fourier: Fourier,
}

impl DyadicLadder {
    /// Ladder up to the grid's `N_max` (see [`Grid::max_dyadic_level`]).
    pub fn new(grid: &Grid) -> Result<Self> {
        let top = grid.max_dyadic_level().ok_or(Error::EmptyLadder)?;
        Self::with_top(grid, top)
    }

    /// Ladder truncated at `top`, which must not exceed the grid's `N_max`.
    pub fn with_top(grid: &Grid, top: u32) -> Result<Self> {
        let max = grid.max_dyadic_level().ok_or(Error::EmptyLadder)?;
        if !top.is_power_of_two() || top > max {
            return Err(Error::LevelNotOnLadder(top));
        }
        let levels: Vec<u32> = (0..=top.trailing_zeros()).map(|j| 1u32 << j).collect();
        let abs_xi: Vec<f64> = grid.xi_squared().iter().map(|k2| k2.sqrt()).collect();
        let cutoffs = levels
            .iter()
            .map(|&lvl| abs_xi.iter().map(|&x| rho_level(lvl, x)).collect())
            .collect();
        Ok(Self {
            grid: *grid,
            levels,
            cutoffs,
            fourier: Fourier::new(grid),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn top(&self) -> u32 {
        *self.levels.last().expect("ladder is never empty")
    }

    fn check_grid(&self, f: &Field) -> Result<()> {
        if *f.grid() == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub(crate) fn position(&self, level: u32) -> Result<usize> {
        self.levels
            .iter()
            .position(|&l| l == level)
            .ok_or(Error::LevelNotOnLadder(level))
    }

    /// Sampled `rho_N` in FFT order.
    pub fn cutoff(&self, level: u32) -> Result<&[f64]> {
        Ok(&self.cutoffs[self.position(level)?])
    }

    /// Applies `rho_N` to raw DFT coefficients in place.
    pub(crate) fn apply_raw(&self, level_pos: usize, coeffs: &mut [num_complex::Complex64]) {
        for (z, w) in coeffs.iter_mut().zip(&self.cutoffs[level_pos]) {
            *z *= *w;
        }
    }

    pub fn project(&self, f: &Field, level: u32) -> Result<Field> {
        self.check_grid(f)?;
        let pos = self.position(level)?;
        let mut c = self.fourier.raw_forward(f.values());
        self.apply_raw(pos, &mut c);
        let mut out = Field::from_raw(self.grid, self.fourier.raw_inverse(c));
        out.set_time(f.time());
        Ok(out)
    }

    /// All projections `P_N f` in ladder order, sharing one forward transform.
    pub fn decompose(&self, f: &Field) -> Result<Vec<Field>> {
        self.check_grid(f)?;
        let c = self.fourier.raw_forward(f.values());
        Ok((0..self.levels.len())
            .map(|pos| {
                let mut b = c.clone();
                self.apply_raw(pos, &mut b);
                Field::from_raw(self.grid, self.fourier.raw_inverse(b))
            })
            .collect())
    }
}

/// `P_N f`.
pub fn dyadic_project(f: &Field, level: u32, ladder: &DyadicLadder) -> Result<Field> {
    ladder.project(f, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::to_frequency;
    use crate::norms::l2;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_support_conditions() {
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert_eq!(rho(x), 1.0);
            assert_eq!(rho(2.0 + x), 0.0);
        }
        assert!(rho(1.5) > 0.0 && rho(1.5) < 1.0);
        // monotone on the transition band
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = rho(1.0 + i as f64 / 1000.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn partition_of_unity_pointwise() {
        let top = 64u32;
        for i in 0..=6400 {
            let x = i as f64 / 100.0;
            let s: f64 = (0..=6).map(|j| rho_level(1 << j, x)).sum();
            assert!((s - 1.0).abs() < 1e-15, "xi = {x}: {s}");
        }
        let s: f64 = (0..=6).map(|j| rho_level(1 << j, 2.0 * top as f64)).sum();
        assert_eq!(s, 0.0);
    }

    fn grid_2pi(n: usize) -> Grid {
        Grid::new(1, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn low_band_field_is_fixed_by_level_one() {
        let g = grid_2pi(64);
        let ladder = DyadicLadder::new(&g).unwrap();
        let f = Field::plane_wave(g, [1, 0], Complex64::new(0.5, 0.2)).add(&Field::plane_wave(
            g,
            [0, 0],
            Complex64::new(1.0, 0.0),
        ));
        let p = dyadic_project(&f, 1, &ladder).unwrap();
        assert!(l2(&p.sub(&f)) < 1e-13);
    }

    #[test]
    fn mode_three_vanishes_at_level_one() {
        let g = grid_2pi(64);
        let ladder = DyadicLadder::new(&g).unwrap();
        let f = Field::plane_wave(g, [3, 0], Complex64::new(1.0, 0.0));
        let p = dyadic_project(&f, 1, &ladder).unwrap();
        assert!(l2(&p) < 1e-14);
    }

    #[test]
    fn level_off_ladder_is_rejected() {
        let g = grid_2pi(64);
        let ladder = DyadicLadder::new(&g).unwrap();
        let f = Field::zeros(g);
        assert_eq!(
            dyadic_project(&f, 3, &ladder),
            Err(Error::LevelNotOnLadder(3))
        );
        assert_eq!(
            dyadic_project(&f, 2 * ladder.top(), &ladder),
            Err(Error::LevelNotOnLadder(2 * ladder.top()))
        );
    }

    fn band_limited(g: Grid, kmax: f64, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = to_frequency(&Field::zeros(g));
        let xi2 = g.xi_squared();
        for (z, k2) in s.values_mut().iter_mut().zip(&xi2) {
            if k2.sqrt() <= kmax {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        crate::fourier::to_physical(&s)
    }

    #[test]
    fn projections_sum_to_band_limited_field() {
        for (dim, n, l) in [(1usize, 256usize, 2.0 * PI), (2, 64, 2.0 * PI)] {
            let g = Grid::new(dim, n, l).unwrap();
            let ladder = DyadicLadder::new(&g).unwrap();
            let f = band_limited(g, ladder.top() as f64, 5);
            let parts = ladder.decompose(&f).unwrap();
            let mut sum = Field::zeros(g);
            for p in &parts {
                sum = sum.add(p);
            }
            assert!(l2(&sum.sub(&f)) <= 1e-12 * l2(&f).max(1.0), "dim {dim}");
        }
    }

    #[test]
    fn neighbour_sum_reproduces_projection() {
        let g = grid_2pi(256);
        let ladder = DyadicLadder::new(&g).unwrap();
        let f = band_limited(g, 120.0, 9);
        let levels = ladder.levels().to_vec();
        for (i, &lvl) in levels.iter().enumerate().take(levels.len() - 1) {
            let p = ladder.project(&f, lvl).unwrap();
            let mut tilde = Field::zeros(g);
            for &near in &levels[i.saturating_sub(1)..=i + 1] {
                tilde = tilde.add(&ladder.project(&p, near).unwrap());
            }
            assert!(l2(&tilde.sub(&p)) <= 1e-12 * l2(&f), "level {lvl}");
        }
    }

    #[test]
    fn projection_commutes_with_propagation() {
        let g = grid_2pi(128);
        let ladder = DyadicLadder::new(&g).unwrap();
        let f = band_limited(g, 40.0, 1);
        let a = crate::propagator::free_propagate(&ladder.project(&f, 8).unwrap(), 0.37, 1.0);
        let b = ladder
            .project(&crate::propagator::free_propagate(&f, 0.37, 1.0), 8)
            .unwrap();
        assert!(l2(&a.sub(&b)) <= 1e-13 * l2(&f));
    }
}
