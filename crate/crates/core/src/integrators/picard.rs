//! Picard iteration of the Duhamel map
//!
//! ```text
//! Phi(u)(t) = exp(i d_av t Delta) u0 + i int_0^t exp(i d_av (t - s) Delta) F(u(s)) ds
//! ```
//!
//! on a uniform time grid, trapezoid rule in `s`, Gauss–Legendre in the averaging
//! variable. Iterates are kept in the interaction picture so the time integral is a
//! cumulative sum.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fourier::Fourier;
use crate::integrators::{raw_l2, EvolutionParams};
use crate::nonlinearity::Nonlinearity;
use crate::norms::l2;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Stop once `sup_t ||u^{k+1}(t) - u^k(t)||_2 <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Refuse data with `||u0||_2` above this.
    pub smallness: Option<f64>,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            smallness: None,
        }
    }
}

/// Residual history of one Picard run.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    /// `sup_t ||u^{k+1}(t) - u^k(t)||_2` per sweep.
    pub residuals: Vec<f64>,
    /// `residuals[k+1] / residuals[k]`.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    /// Sweep was stopped because residuals blew up.
    pub diverged: bool,
}

impl PicardReport {
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.contraction_ratios.iter().copied().reduce(f64::max)
    }
}

struct DuhamelMap<'a> {
    fourier: &'a Fourier,
    nl: &'a Nonlinearity,
    xi2: Vec<f64>,
    d_av: f64,
    times: Vec<f64>,
}

impl DuhamelMap<'_> {
    fn phase(&self, c: &[Complex64], t: f64) -> Vec<Complex64> {
        c.iter()
            .zip(&self.xi2)
            .map(|(z, k2)| z * Complex64::from_polar(1.0, -self.d_av * t * k2))
            .collect()
    }

    /// Interaction-picture integrand `i exp(-i d_av t Delta) F(u(t))` at every node.
    fn integrands(&self, iterate: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        iterate
            .par_iter()
            .zip(self.times.par_iter())
            .map(|(c, &t)| {
                let f = self.nl.apply_raw(c);
                let f: Vec<Complex64> =
                    f.into_iter().map(|z| Complex64::new(-z.im, z.re)).collect();
                self.phase(&f, -t)
            })
            .collect()
    }

    /// `Phi(u)` at every node, physical-frame raw coefficients.
    fn apply(&self, c0: &[Complex64], iterate: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let g = self.integrands(iterate);
        let mut w = c0.to_vec();
        let mut out = Vec::with_capacity(iterate.len());
        out.push(self.phase(&w, self.times[0]));
        for j in 1..self.times.len() {
            let h = self.times[j] - self.times[j - 1];
            for (i, z) in w.iter_mut().enumerate() {
                *z += 0.5 * h * (g[j - 1][i] + g[j][i]);
            }
            out.push(self.phase(&w, self.times[j]));
        }
        out
    }
}

fn sup_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>], grid: &crate::grid::Grid) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d: Vec<Complex64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            raw_l2(&d, grid)
        })
        .fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Fixed point of the discrete Duhamel map on the grid `t_j = j dt`, `j = 0..=t_final/dt`.
///
/// Non-convergence is reported in the [`PicardReport`], not as an error.
pub fn picard_solve(
    u0: &Field,
    params: &EvolutionParams,
    opts: &PicardOptions,
) -> Result<(Trajectory, PicardReport)> {
    params.validate()?;
    if !(opts.tol.is_finite() && opts.tol >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: opts.tol,
            reason: "tolerance must be nonnegative",
        });
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "max_iter",
            value: 0.0,
            reason: "need at least one sweep",
        });
    }
    let norm0 = l2(u0);
    if let Some(limit) = opts.smallness {
        if norm0 > limit {
            return Err(Error::NotSmall { norm: norm0, limit });
        }
    }
    let grid = *u0.grid();
    let fourier = Fourier::new(&grid);
    let nl = Nonlinearity::averaged(&grid, &params.nl)?;
    let steps = params.step_count()?;
    let times: Vec<f64> = (0..=steps).map(|j| j as f64 * params.dt).collect();
    let map = DuhamelMap {
        fourier: &fourier,
        nl: &nl,
        xi2: grid.xi_squared(),
        d_av: params.d_av,
        times,
    };

    let c0 = fourier.raw_forward(u0.values());
    let mut current: Vec<Vec<Complex64>> = map.times.iter().map(|&t| map.phase(&c0, t)).collect();
    let mut report = PicardReport {
        residuals: Vec::new(),
        contraction_ratios: Vec::new(),
        converged: false,
        diverged: false,
    };
    for _ in 0..opts.max_iter {
        let next = map.apply(&c0, &current);
        let res = sup_distance(&next, &current, &grid);
        if let Some(&prev) = report.residuals.last() {
            report
                .contraction_ratios
                .push(if prev > 0.0 { res / prev } else { 0.0 });
        }
        report.residuals.push(res);
        current = next;
        if res <= opts.tol {
            report.converged = true;
            break;
        }
        let scale = report.residuals[0].max(norm0);
        if !res.is_finite() || res > 1e6 * scale {
            report.diverged = true;
            break;
        }
    }

    let mut traj = Trajectory::new();
    if report.diverged {
        // no meaningful iterate to hand back
        return Ok((traj, report));
    }
    for (t, c) in map.times.iter().zip(current) {
        traj.push(*t, Field::new(grid, fourier.raw_inverse(c))?)?;
    }
    Ok((traj, report))
}

/// `sup_t ||Phi(u)(t) - u(t)||_2` for a trajectory on a uniform grid starting at 0.
pub fn duhamel_defect(traj: &Trajectory, params: &EvolutionParams) -> Result<f64> {
    let grid = *traj.grid().ok_or(Error::EmptyTrajectory)?;
    let fourier = Fourier::new(&grid);
    let nl = Nonlinearity::averaged(&grid, &params.nl)?;
    let map = DuhamelMap {
        fourier: &fourier,
        nl: &nl,
        xi2: grid.xi_squared(),
        d_av: params.d_av,
        times: traj.times().to_vec(),
    };
    let current: Vec<Vec<Complex64>> = traj
        .snapshots()
        .iter()
        .map(|f| map.fourier.raw_forward(f.values()))
        .collect();
    let next = map.apply(&current[0], &current);
    Ok(sup_distance(&next, &current, &grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::nonlinearity::NonlinearityParams;

    fn setup(amplitude: f64) -> (Field, EvolutionParams) {
        let g = Grid::new(1, 128, 40.0).unwrap();
        let u0 = Field::gaussian(g, 1.0, amplitude);
        let p = EvolutionParams::averaged(1.0, 0.05, 1.0, NonlinearityParams::new(2.0, 16));
        (u0, p)
    }

    #[test]
    fn zero_data_converges_immediately() {
        let (u0, p) = setup(0.0);
        let (traj, rep) = picard_solve(&u0, &p, &PicardOptions::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations(), 1);
        assert_eq!(rep.residuals[0], 0.0);
        assert!(traj.snapshots().iter().all(|f| l2(f) == 0.0));
    }

    #[test]
    fn small_data_contracts_and_satisfies_duhamel() {
        let (u0, p) = setup(0.3);
        let opts = PicardOptions {
            tol: 1e-13,
            max_iter: 60,
            smallness: None,
        };
        let (traj, rep) = picard_solve(&u0, &p, &opts).unwrap();
        assert!(rep.converged, "{rep:?}");
        assert!(rep.contraction_ratios.iter().all(|&r| r < 1.0));
        for w in rep.residuals.windows(2).skip(1) {
            assert!(w[1] <= w[0]);
        }
        assert!(duhamel_defect(&traj, &p).unwrap() < 1e-12);
    }

    #[test]
    fn single_sweep_bookkeeping() {
        let (u0, p) = setup(0.3);
        let opts = PicardOptions {
            tol: 0.0,
            max_iter: 1,
            smallness: None,
        };
        let (_, rep) = picard_solve(&u0, &p, &opts).unwrap();
        assert_eq!(rep.residuals.len(), 1);
        assert!(rep.contraction_ratios.is_empty());
        assert!(!rep.converged);
    }

    #[test]
    fn smallness_gate() {
        let (u0, p) = setup(1.0);
        let opts = PicardOptions {
            smallness: Some(0.1),
            ..PicardOptions::default()
        };
        assert!(matches!(
            picard_solve(&u0, &p, &opts),
            Err(Error::NotSmall { .. })
        ));
    }

    #[test]
    fn large_data_does_not_converge() {
        let (u0, p) = setup(3.0);
        let opts = PicardOptions {
            tol: 1e-12,
            max_iter: 30,
            smallness: None,
        };
        let (_, rep) = picard_solve(&u0, &p, &opts).unwrap();
        assert!(!rep.converged);
    }
}
