//! Scattering-state extraction from a computed trajectory.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::l2;
use crate::propagator::FreePropagator;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringProfile {
    /// `w(T_last)` with `w(t) = exp(-i d_av t Delta) u(t)`.
    pub phi_plus: Field,
    /// `(t, ||w(t) - w(T_last)||_2)`.
    pub residuals: Vec<(f64, f64)>,
}

impl ScatteringProfile {
    /// Whether `r(t)` is nonincreasing on `t >= from` up to a relative slack.
    pub fn nonincreasing_after(&self, from: f64, slack: f64) -> bool {
        let tail: Vec<f64> = self
            .residuals
            .iter()
            .filter(|(t, _)| *t >= from)
            .map(|(_, r)| *r)
            .collect();
        let scale = tail.iter().copied().fold(0.0, f64::max);
        tail.windows(2).all(|w| w[1] <= w[0] + slack * scale)
    }

    /// Residual at the stored time closest to `t`.
    pub fn residual_near(&self, t: f64) -> Option<f64> {
        self.residuals
            .iter()
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
            .map(|(_, r)| *r)
    }
}

pub fn scattering_profile(traj: &Trajectory, d_av: f64) -> Result<ScatteringProfile> {
    if traj.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: traj.len(),
        });
    }
    let grid = traj.grid().ok_or(Error::EmptyTrajectory)?;
    let prop = FreePropagator::new(grid);
    let pulled: Vec<Field> = traj
        .times()
        .iter()
        .zip(traj.snapshots())
        .map(|(t, f)| prop.propagate(f, *t, -d_av))
        .collect();
    let phi_plus = pulled.last().expect("at least three snapshots").clone();
    let residuals = traj
        .times()
        .iter()
        .zip(&pulled)
        .map(|(t, w)| (*t, l2(&w.sub(&phi_plus))))
        .collect();
    let mut phi_plus = phi_plus;
    phi_plus.set_time(None);
    Ok(ScatteringProfile {
        phi_plus,
        residuals,
    })
}
