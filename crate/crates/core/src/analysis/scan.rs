//! Seeded ratio scans over dyadic frequency separations.
//!
//! Randomness: every task seeds its own `ChaCha8Rng` with `base_seed + seed_index`
//! (wrapping), so rows do not depend on scheduling. Complex amplitudes are standard
//! normal in real and imaginary part.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analysis::bilinear::{bilinear_ratio_packets, Packet};
use crate::analysis::strichartz::{check_admissible, strichartz_ratio, TimeWindow};
use crate::dyadic::DyadicLadder;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fourier::Fourier;
use crate::grid::Grid;

/// Decay exponent in the bilinear estimate: `1/6` for `d = 1`, `1/2` for `d = 2`.
pub fn bound_exponent(dim: usize) -> f64 {
    if dim == 1 {
        1.0 / 6.0
    } else {
        0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub n1: u32,
    pub n2: u32,
    pub seed: u64,
    pub ratio: f64,
    /// `ratio * (N_max / N_min)^beta`.
    pub normalized: f64,
}

impl ScanRow {
    pub fn separation(&self) -> f64 {
        self.n1.max(self.n2) as f64 / self.n1.min(self.n2) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateScanReport {
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `log ratio` against `log(N_min / N_max)`.
    pub fitted_exponent: f64,
    pub bound_exponent: f64,
    pub normalized_max: f64,
    pub normalized_mean: f64,
    /// Least-squares slope of `log normalized` against `log(N_max / N_min)`.
    pub normalized_slope: f64,
}

impl EstimateScanReport {
    pub const MIN_SEPARATIONS: usize = 4;

    pub fn from_rows(rows: Vec<ScanRow>, bound_exponent: f64) -> Result<Self> {
        let mut seps: Vec<f64> = rows.iter().map(ScanRow::separation).collect();
        seps.sort_by(f64::total_cmp);
        seps.dedup();
        if seps.len() < Self::MIN_SEPARATIONS {
            return Err(Error::TooFewSamples {
                needed: Self::MIN_SEPARATIONS,
                got: seps.len(),
            });
        }
        let fit: Vec<&ScanRow> = rows.iter().filter(|r| r.ratio > 0.0).collect();
        let log_sep: Vec<f64> = fit.iter().map(|r| r.separation().ln()).collect();
        let neg_sep: Vec<f64> = log_sep.iter().map(|x| -x).collect();
        let log_ratio: Vec<f64> = fit.iter().map(|r| r.ratio.ln()).collect();
        let log_norm: Vec<f64> = fit.iter().map(|r| r.normalized.ln()).collect();
        let nan = f64::NAN;
        let normalized_max = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
        let normalized_mean =
            rows.iter().map(|r| r.normalized).sum::<f64>() / rows.len().max(1) as f64;
        Ok(Self {
            fitted_exponent: least_squares_slope(&neg_sep, &log_ratio).unwrap_or(nan),
            bound_exponent,
            normalized_max,
            normalized_mean,
            normalized_slope: least_squares_slope(&log_sep, &log_norm).unwrap_or(nan),
            rows,
        })
    }
}

/// Slope of the least-squares line through `(x_i, y_i)`; `None` without spread in `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn normal_c64(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random trigonometric polynomial with `|xi| <= band`, times
/// `exp(-|x|^2 / (2 width^2))`, scaled to unit `L2` norm.
pub fn random_windowed_field(grid: &Grid, band: f64, width: f64, rng: &mut ChaCha8Rng) -> Field {
    let xi2 = grid.xi_squared();
    let coeffs: Vec<Complex64> = xi2
        .iter()
        .map(|k2| {
            if k2.sqrt() <= band {
                normal_c64(rng)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let values = Fourier::new(grid).raw_inverse(coeffs);
    let s = 0.5 / (width * width);
    let windowed: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let x = grid.position(i);
            z * (-(x[0] * x[0] + x[1] * x[1]) * s).exp()
        })
        .collect();
    let f = Field::new(*grid, windowed).expect("finite by construction");
    let norm = crate::norms::l2(&f);
    if norm > 0.0 {
        f.scaled(Complex64::new(1.0 / norm, 0.0))
    } else {
        f
    }
}

fn task_rng(base_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(index))
}

/// Bilinear scan with a low block at `low_level` and high blocks `low_level * 2^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearScan {
    pub dim: usize,
    pub box_length: f64,
    /// Envelope grid points per axis.
    pub envelope_n: usize,
    /// Exponents `j` of the separations `N_max / N_min = 2^j`.
    pub separations: Vec<u32>,
    pub low_level: u32,
    pub seeds: u64,
    pub base_seed: u64,
    pub d_av: f64,
    pub time_samples: usize,
    /// Gaussian window width of each envelope.
    pub envelope_width: f64,
    /// Spectral radius of the random envelope content.
    pub envelope_band: f64,
}

impl BilinearScan {
    pub fn desk(dim: usize) -> Self {
        Self {
            dim,
            box_length: 64.0,
            envelope_n: if dim == 1 { 256 } else { 64 },
            separations: (4..=9).collect(),
            low_level: 1,
            seeds: 32,
            base_seed: 0,
            d_av: 1.0,
            time_samples: 128,
            envelope_width: 4.0,
            envelope_band: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::InvalidDimension(self.dim));
        }
        if self.d_av == 0.0 || !self.d_av.is_finite() {
            return Err(Error::InvalidParameter {
                name: "d_av",
                value: self.d_av,
                reason: "the window T = L / (8 |d_av| N_max) needs d_av != 0",
            });
        }
        if self.low_level == 0 || !self.low_level.is_power_of_two() {
            return Err(Error::LevelNotOnLadder(self.low_level));
        }
        if self.seeds == 0 {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        TimeWindow::new(1.0, self.time_samples)?;
        Grid::new(self.dim, self.envelope_n, self.box_length)?;
        Ok(())
    }

    /// Window over which the high packet crosses a quarter of the box.
    pub fn window(&self, n_high: u32) -> Result<TimeWindow> {
        TimeWindow::new(
            self.box_length / (8.0 * self.d_av.abs() * n_high as f64),
            self.time_samples,
        )
    }
}

struct SeedDraw {
    env_high: Field,
    env_low: Field,
    /// Carrier magnitude factor in `[0.8, 1.2]` and unit direction.
    high: (f64, [f64; 2]),
    low: (f64, [f64; 2]),
}

fn draw_direction(dim: usize, rng: &mut ChaCha8Rng) -> [f64; 2] {
    if dim == 1 {
        [if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0]
    } else {
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        [th.cos(), th.sin()]
    }
}

fn carrier(grid: &Grid, level: u32, (mag, dir): (f64, [f64; 2])) -> [i64; 2] {
    let k = level as f64 * mag / grid.dxi();
    let c = [(k * dir[0]).round() as i64, (k * dir[1]).round() as i64];
    if grid.dim() == 1 {
        [c[0], 0]
    } else {
        c
    }
}

/// Random packets per seed, reused across separations.
pub fn bilinear_scan(cfg: &BilinearScan) -> Result<EstimateScanReport> {
    cfg.validate()?;
    let grid = Grid::new(cfg.dim, cfg.envelope_n, cfg.box_length)?;
    let draws: Vec<SeedDraw> = (0..cfg.seeds)
        .map(|s| {
            let mut rng = task_rng(cfg.base_seed, s);
            let env_high =
                random_windowed_field(&grid, cfg.envelope_band, cfg.envelope_width, &mut rng);
            let env_low =
                random_windowed_field(&grid, cfg.envelope_band, cfg.envelope_width, &mut rng);
            let mh = rng.gen_range(0.8..1.2);
            let ml = rng.gen_range(0.8..1.2);
            let dh = draw_direction(cfg.dim, &mut rng);
            let dl = draw_direction(cfg.dim, &mut rng);
            SeedDraw {
                env_high,
                env_low,
                high: (mh, dh),
                low: (ml, dl),
            }
        })
        .collect();
    let beta = bound_exponent(cfg.dim);
    let tasks: Vec<(u32, u64)> = cfg
        .separations
        .iter()
        .flat_map(|&j| (0..cfg.seeds).map(move |s| (j, s)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(j, s)| {
            let n1 = 1u32
                .checked_shl(j)
                .and_then(|m| cfg.low_level.checked_mul(m))
                .ok_or(Error::LevelNotOnLadder(u32::MAX))?;
            let n2 = cfg.low_level;
            let d = &draws[s as usize];
            let f = Packet::new(d.env_high.clone(), carrier(&grid, n1, d.high))?;
            let g = Packet::new(d.env_low.clone(), carrier(&grid, n2, d.low))?;
            let ratio = bilinear_ratio_packets(&f, &g, n1, n2, &cfg.window(n1)?, cfg.d_av)?;
            let sep = (n1 / n2) as f64;
            Ok(ScanRow {
                n1,
                n2,
                seed: cfg.base_seed.wrapping_add(s),
                ratio,
                normalized: ratio * sep.powf(beta),
            })
        })
        .collect::<Result<Vec<ScanRow>>>()?;
    EstimateScanReport::from_rows(rows, beta)
}

/// Strichartz ratios of `P_N f` for random `f`, rows `(N, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzScan {
    pub grid: Grid,
    pub levels: Vec<u32>,
    pub q: f64,
    pub r: f64,
    pub window: TimeWindow,
    pub seeds: u64,
    pub base_seed: u64,
    pub d_av: f64,
    pub data_width: f64,
}

pub fn strichartz_scan(cfg: &StrichartzScan) -> Result<EstimateScanReport> {
    check_admissible(cfg.q, cfg.r, cfg.grid.dim())?;
    cfg.window.validate()?;
    if cfg.seeds == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let ladder = DyadicLadder::new(&cfg.grid)?;
    for &lvl in &cfg.levels {
        ladder.cutoff(lvl)?;
    }
    let band = 2.0 * ladder.top() as f64;
    let data: Vec<Field> = (0..cfg.seeds)
        .map(|s| {
            let mut rng = task_rng(cfg.base_seed, s);
            random_windowed_field(&cfg.grid, band, cfg.data_width, &mut rng)
        })
        .collect();
    let tasks: Vec<(u32, u64)> = cfg
        .levels
        .iter()
        .flat_map(|&n| (0..cfg.seeds).map(move |s| (n, s)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(n, s)| {
            let block = ladder.project(&data[s as usize], n)?;
            let ratio = strichartz_ratio(&block, cfg.q, cfg.r, &cfg.window, cfg.d_av)?;
            Ok(ScanRow {
                n1: n,
                n2: 1,
                seed: cfg.base_seed.wrapping_add(s),
                ratio,
                normalized: ratio,
            })
        })
        .collect::<Result<Vec<ScanRow>>>()?;
    EstimateScanReport::from_rows(rows, 0.0)
}

/// Seed-averaged ratio at the highest scanned level for windows `factor * half_width`,
/// sampled at the base density. Returns `(half_width, mean ratio)` per factor.
pub fn strichartz_window_profile(cfg: &StrichartzScan, factors: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_admissible(cfg.q, cfg.r, cfg.grid.dim())?;
    let ladder = DyadicLadder::new(&cfg.grid)?;
    let level = *cfg
        .levels
        .iter()
        .max()
        .ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
    let band = 2.0 * ladder.top() as f64;
    let blocks: Vec<Field> = (0..cfg.seeds)
        .map(|s| {
            let mut rng = task_rng(cfg.base_seed, s);
            ladder.project(
                &random_windowed_field(&cfg.grid, band, cfg.data_width, &mut rng),
                level,
            )
        })
        .collect::<Result<_>>()?;
    factors
        .iter()
        .map(|&f| {
            let samples = ((cfg.window.samples as f64) * f).round() as usize;
            let window = TimeWindow::new(cfg.window.half_width * f, samples)?;
            let ratios = blocks
                .par_iter()
                .map(|b| strichartz_ratio(b, cfg.q, cfg.r, &window, cfg.d_av))
                .collect::<Result<Vec<f64>>>()?;
            Ok((
                window.half_width,
                ratios.iter().sum::<f64>() / ratios.len().max(1) as f64,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 - 0.75 * v).collect();
        assert!((least_squares_slope(&x, &y).unwrap() + 0.75).abs() < 1e-15);
        assert!(least_squares_slope(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn report_needs_four_separations() {
        let row = |n1: u32| ScanRow {
            n1,
            n2: 1,
            seed: 0,
            ratio: 1.0 / n1 as f64,
            normalized: 1.0,
        };
        assert!(EstimateScanReport::from_rows(vec![row(2), row(4), row(8)], 0.0).is_err());
        let rep =
            EstimateScanReport::from_rows(vec![row(2), row(4), row(8), row(16)], 1.0).unwrap();
        assert!((rep.fitted_exponent - 1.0).abs() < 1e-12);
        assert!(rep.normalized_slope.abs() < 1e-12);
        assert_eq!(rep.normalized_max, 1.0);
    }

    #[test]
    fn random_field_is_reproducible_and_band_limited() {
        let g = Grid::new(1, 128, 64.0).unwrap();
        let a = random_windowed_field(&g, 0.5, 4.0, &mut task_rng(7, 3));
        let b = random_windowed_field(&g, 0.5, 4.0, &mut task_rng(7, 3));
        assert_eq!(a, b);
        assert!((crate::norms::l2(&a) - 1.0).abs() < 1e-12);
        let c = random_windowed_field(&g, 0.5, 4.0, &mut task_rng(7, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn small_bilinear_scan_runs() {
        let mut cfg = BilinearScan::desk(1);
        cfg.envelope_n = 128;
        cfg.seeds = 2;
        cfg.separations = vec![2, 3, 4, 5];
        cfg.time_samples = 32;
        let rep = bilinear_scan(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 8);
        assert!(rep
            .rows
            .iter()
            .all(|r| r.ratio > 0.0 && r.ratio.is_finite()));
        assert!(rep.normalized_max.is_finite());
        assert_eq!(rep.rows[0].n1, 4);
        assert_eq!(rep.rows[7].n1, 32);
    }

    #[test]
    fn small_strichartz_scan_runs() {
        let cfg = StrichartzScan {
            grid: Grid::new(1, 512, 8.0 * std::f64::consts::PI).unwrap(),
            levels: vec![2, 4, 8, 16],
            q: 6.0,
            r: 6.0,
            window: TimeWindow::new(0.5, 32).unwrap(),
            seeds: 2,
            base_seed: 11,
            d_av: 1.0,
            data_width: 3.0,
        };
        let rep = strichartz_scan(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 8);
        assert!(rep
            .rows
            .iter()
            .all(|r| r.ratio > 0.0 && r.ratio.is_finite()));
        assert_eq!(rep.bound_exponent, 0.0);

        let profile = strichartz_window_profile(&cfg, &[1.0, 2.0]).unwrap();
        let top: Vec<f64> = rep
            .rows
            .iter()
            .filter(|r| r.n1 == 16)
            .map(|r| r.ratio)
            .collect();
        let mean = top.iter().sum::<f64>() / top.len() as f64;
        assert_eq!(profile[0], (0.5, mean));
        assert_eq!(profile[1].0, 1.0);
        assert!(profile[1].1 >= profile[0].1);
    }
}
