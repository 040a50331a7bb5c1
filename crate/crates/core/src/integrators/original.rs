//! Strang splitting for `i u_t + d(t) Delta u + |u|^(2 sigma) u = 0` with
//! `d(t) = d_av + d_0(t/eps)/eps`.
//!
//! Dispersion half-steps use the exact integral of `d` over the sub-interval; the
//! nonlinear sub-flow is the exact phase rotation `u -> exp(i |u|^(2 sigma) dt) u`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::integrators::{steps_per, EvolutionParams};
use crate::propagator::FreePropagator;
use crate::trajectory::Trajectory;

/// Mean-zero fast part `d_0` of the dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersionMap {
    /// 2-periodic, `+1` on `[0, 1)` and `-1` on `[1, 2)`.
    #[default]
    Square,
    /// `d_0 = 0`: the original equation with constant dispersion `d_av`.
    Zero,
}

impl DispersionMap {
    pub fn as_str(&self) -> &'static str {
        match self {
            DispersionMap::Square => "square",
            DispersionMap::Zero => "zero",
        }
    }

    /// `d_0(s)`.
    pub fn value(&self, s: f64) -> f64 {
        match self {
            DispersionMap::Square => {
                if s.rem_euclid(2.0) < 1.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            DispersionMap::Zero => 0.0,
        }
    }

    /// `int_0^s d_0`, a triangle wave with values in `[0, 1]` for the square map.
    pub fn primitive(&self, s: f64) -> f64 {
        match self {
            DispersionMap::Square => {
                let r = s.rem_euclid(2.0);
                if r < 1.0 {
                    r
                } else {
                    2.0 - r
                }
            }
            DispersionMap::Zero => 0.0,
        }
    }
}

impl std::str::FromStr for DispersionMap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "square" => Ok(Self::Square),
            "zero" => Ok(Self::Zero),
            other => Err(format!("unknown dispersion map `{other}` (square|zero)")),
        }
    }
}

/// Reusable split-step integrator on one grid.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    prop: FreePropagator,
    d_av: f64,
    eps: f64,
    sigma: f64,
    map: DispersionMap,
}

impl SplitStepper {
    pub fn new(grid: &Grid, params: &EvolutionParams) -> Result<Self> {
        if params.eps.is_nan() || params.eps <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: params.eps,
                reason: "the original equation needs eps > 0",
            });
        }
        params.nl.validate()?;
        Ok(Self {
            prop: FreePropagator::new(grid),
            d_av: params.d_av,
            eps: params.eps,
            sigma: params.nl.sigma,
            map: params.dispersion,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.prop.grid()
    }

    /// `int_0^t d(s) ds`.
    pub fn accumulated_dispersion(&self, t: f64) -> f64 {
        self.d_av * t + self.map.primitive(t / self.eps)
    }

    /// `d(t)`.
    pub fn dispersion(&self, t: f64) -> f64 {
        self.d_av + self.map.value(t / self.eps) / self.eps
    }

    fn rotate(&self, values: &mut [Complex64], dt: f64) {
        for z in values.iter_mut() {
            let phase = z.norm_sqr().powf(self.sigma) * dt;
            *z *= Complex64::from_polar(1.0, phase);
        }
    }

    /// One Strang step over `[t, t + dt]` (`dt` may be negative).
    pub fn step_values(&self, u: &[Complex64], t: f64, dt: f64) -> Vec<Complex64> {
        let fourier = self.prop.fourier();
        let d0 = self.accumulated_dispersion(t);
        let dm = self.accumulated_dispersion(t + 0.5 * dt);
        let d1 = self.accumulated_dispersion(t + dt);
        let mut c = fourier.raw_forward(u);
        self.prop.apply_raw(&mut c, dm - d0);
        let mut v = fourier.raw_inverse(c);
        self.rotate(&mut v, dt);
        let mut c = fourier.raw_forward(&v);
        self.prop.apply_raw(&mut c, d1 - dm);
        fourier.raw_inverse(c)
    }

    pub fn step(&self, u: &Field, t: f64, dt: f64) -> Result<Field> {
        if u.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let v = self.step_values(u.values(), t, dt);
        Field::new(*u.grid(), v)
            .map(|f| f.with_time(t + dt))
            .map_err(|_| Error::Blowup { t: t + dt })
    }

    pub fn solve(&self, u0: &Field, params: &EvolutionParams) -> Result<Trajectory> {
        params.validate()?;
        if steps_per(self.eps, params.dt).is_none() {
            return Err(Error::MisalignedStep {
                dt: params.dt,
                eps: self.eps,
            });
        }
        let steps = params.step_count()?;
        let mut traj = Trajectory::new();
        traj.push(0.0, u0.clone())?;
        let mut v = u0.values().to_vec();
        for s in 1..=steps {
            let t = (s - 1) as f64 * params.dt;
            v = self.step_values(&v, t, params.dt);
            let t_next = s as f64 * params.dt;
            if s % params.snapshot_every == 0 || s == steps {
                let f =
                    Field::new(*u0.grid(), v.clone()).map_err(|_| Error::Blowup { t: t_next })?;
                traj.push(t_next, f)?;
            } else if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Blowup { t: t_next });
            }
        }
        Ok(traj)
    }
}

/// One Strang step of size `params.dt` from time `t`.
pub fn step_original(u: &Field, t: f64, params: &EvolutionParams) -> Result<Field> {
    params.validate()?;
    SplitStepper::new(u.grid(), params)?.step(u, t, params.dt)
}

/// Trajectory of the original equation; requires `eps > 0` and `dt | eps`.
pub fn solve_original(u0: &Field, params: &EvolutionParams) -> Result<Trajectory> {
    SplitStepper::new(u0.grid(), params)?.solve(u0, params)
}
