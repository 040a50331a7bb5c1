//! Time evolution of the averaged and the original equation, and the Picard
//! iteration of the Duhamel map.

mod averaged;
mod original;
mod picard;

pub use averaged::{solve_averaged, step_averaged, AveragedStepper};
pub use original::{solve_original, step_original, DispersionMap, SplitStepper};
pub use picard::{duhamel_defect, picard_solve, PicardOptions, PicardReport};

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityParams;

/// Relative mass drift beyond which a run is flagged as unreliable.
pub const MASS_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    /// Average dispersion `d_av`.
    pub d_av: f64,
    /// Fast period scale; `0` selects the averaged equation.
    pub eps: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Store every `snapshot_every`-th step (the final step is always stored).
    pub snapshot_every: usize,
    pub nl: NonlinearityParams,
    /// Mean-zero part of the dispersion for the original equation.
    pub dispersion: DispersionMap,
}

impl EvolutionParams {
    pub fn averaged(d_av: f64, dt: f64, t_final: f64, nl: NonlinearityParams) -> Self {
        Self {
            d_av,
            eps: 0.0,
            dt,
            t_final,
            snapshot_every: 1,
            nl,
            dispersion: DispersionMap::Square,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.d_av.is_finite() {
            return Err(Error::InvalidParameter {
                name: "d_av",
                value: self.d_av,
                reason: "average dispersion must be finite",
            });
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "time step must be positive",
            });
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                value: self.t_final,
                reason: "horizon must be positive",
            });
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: self.eps,
                reason: "eps must be nonnegative",
            });
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter {
                name: "snapshot_every",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        if self.eps > 0.0 {
            steps_per(self.eps, self.dt).ok_or(Error::MisalignedStep {
                dt: self.dt,
                eps: self.eps,
            })?;
        }
        self.nl.validate()?;
        self.step_count()?;
        Ok(())
    }

    /// Number of steps of size `dt` reaching `t_final`.
    pub fn step_count(&self) -> Result<usize> {
        steps_per(self.t_final, self.dt).ok_or(Error::InvalidParameter {
            name: "t_final",
            value: self.t_final,
            reason: "horizon must be a whole number of time steps",
        })
    }
}

/// `span / step` if it is a positive integer (to relative 1e-9).
pub(crate) fn steps_per(span: f64, step: f64) -> Option<usize> {
    let r = span / step;
    let k = r.round();
    if k >= 1.0 && (r - k).abs() <= 1e-9 * r {
        Some(k as usize)
    } else {
        None
    }
}

/// `||f||_2` from raw DFT coefficients on a grid of `len` points and cell volume `w`.
pub(crate) fn raw_l2(coeffs: &[num_complex::Complex64], grid: &crate::grid::Grid) -> f64 {
    let n = grid.len() as f64;
    let s: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    (s * grid.cell_volume() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_check() {
        assert_eq!(steps_per(0.1, 0.025), Some(4));
        assert_eq!(steps_per(0.1, 0.03), None);
        assert_eq!(steps_per(1.0, 1e-3), Some(1000));
    }

    #[test]
    fn misaligned_eps_rejected() {
        let mut p = EvolutionParams::averaged(1.0, 0.03, 0.9, NonlinearityParams::new(1.0, 4));
        p.eps = 0.1;
        assert_eq!(
            p.validate(),
            Err(Error::MisalignedStep { dt: 0.03, eps: 0.1 })
        );
    }
}
