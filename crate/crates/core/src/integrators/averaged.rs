//! Integrating-factor RK4 for the averaged equation.
//!
//! In the interaction picture `w(t) = exp(-i d_av t Delta) u(t)` the equation becomes
//! `w' = i exp(-i d_av t Delta) F(exp(i d_av t Delta) w)`, and classical RK4 is applied
//! to `w`. The linear part is therefore exact.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::integrators::EvolutionParams;
use crate::nonlinearity::Nonlinearity;
use crate::propagator::FreePropagator;
use crate::trajectory::Trajectory;

/// Reusable IF-RK4 stepper on one grid.
#[derive(Debug, Clone)]
pub struct AveragedStepper {
    prop: FreePropagator,
    nl: Option<Nonlinearity>,
    d_av: f64,
}

impl AveragedStepper {
    pub fn new(grid: &Grid, params: &EvolutionParams) -> Result<Self> {
        Ok(Self {
            prop: FreePropagator::new(grid),
            nl: Some(Nonlinearity::averaged(grid, &params.nl)?),
            d_av: params.d_av,
        })
    }

    /// The same stepper with the nonlinearity switched off.
    pub fn linear(grid: &Grid, d_av: f64) -> Self {
        Self {
            prop: FreePropagator::new(grid),
            nl: None,
            d_av,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.prop.grid()
    }

    fn rhs(&self, c: &[Complex64]) -> Vec<Complex64> {
        match &self.nl {
            Some(nl) => nl
                .apply_raw(c)
                .into_iter()
                .map(|z| Complex64::new(-z.im, z.re))
                .collect(),
            None => vec![Complex64::new(0.0, 0.0); c.len()],
        }
    }

    /// One step of signed size `dt` on raw DFT coefficients.
    pub fn step_raw(&self, c: &[Complex64], dt: f64) -> Vec<Complex64> {
        let xi2 = self.prop.xi_squared();
        let half: Vec<Complex64> = xi2
            .iter()
            .map(|k2| Complex64::from_polar(1.0, -self.d_av * 0.5 * dt * k2))
            .collect();
        let full: Vec<Complex64> = half.iter().map(|e| e * e).collect();
        let h = dt;

        let k1 = self.rhs(c);
        let a: Vec<Complex64> = (0..c.len())
            .map(|i| half[i] * (c[i] + 0.5 * h * k1[i]))
            .collect();
        let k2 = self.rhs(&a);
        let b: Vec<Complex64> = (0..c.len())
            .map(|i| half[i] * c[i] + 0.5 * h * k2[i])
            .collect();
        let k3 = self.rhs(&b);
        let d: Vec<Complex64> = (0..c.len())
            .map(|i| full[i] * c[i] + h * half[i] * k3[i])
            .collect();
        let k4 = self.rhs(&d);
        (0..c.len())
            .map(|i| {
                full[i] * c[i]
                    + h / 6.0 * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i])
            })
            .collect()
    }

    /// `u(t) -> u(t + dt)`; fails if the result is not finite.
    pub fn step(&self, u: &Field, t: f64, dt: f64) -> Result<Field> {
        if u.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let fourier = self.prop.fourier();
        let c = fourier.raw_forward(u.values());
        let next = self.step_raw(&c, dt);
        let out = Field::new(*u.grid(), fourier.raw_inverse(next)).map_err(|e| match e {
            Error::NonFinite => Error::Blowup { t: t + dt },
            other => other,
        })?;
        Ok(out.with_time(t + dt))
    }

    /// Runs to `params.t_final`, storing every `params.snapshot_every`-th step.
    pub fn solve(&self, u0: &Field, params: &EvolutionParams) -> Result<Trajectory> {
        params.validate()?;
        if u0.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let steps = params.step_count()?;
        let fourier = self.prop.fourier();
        let mut traj = Trajectory::new();
        traj.push(0.0, u0.clone())?;
        let mut c = fourier.raw_forward(u0.values());
        for s in 1..=steps {
            c = self.step_raw(&c, params.dt);
            if s % params.snapshot_every == 0 || s == steps {
                let t = s as f64 * params.dt;
                let f = Field::new(*u0.grid(), fourier.raw_inverse(c.clone()))
                    .map_err(|_| Error::Blowup { t })?;
                traj.push(t, f)?;
            } else if !c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Blowup {
                    t: s as f64 * params.dt,
                });
            }
        }
        Ok(traj)
    }
}

/// One IF-RK4 step of size `params.dt` from time `t`.
pub fn step_averaged(u: &Field, t: f64, params: &EvolutionParams) -> Result<Field> {
    params.nl.validate()?;
    AveragedStepper::new(u.grid(), params)?.step(u, t, params.dt)
}

/// Averaged-equation trajectory from `u0`; check
/// [`Trajectory::max_relative_mass_drift`] against [`super::MASS_DRIFT_LIMIT`].
pub fn solve_averaged(u0: &Field, params: &EvolutionParams) -> Result<Trajectory> {
    AveragedStepper::new(u0.grid(), params)?.solve(u0, params)
}
