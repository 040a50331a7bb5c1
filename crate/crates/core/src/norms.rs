//! Spatial and space-time norms with grid quadrature.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fourier::Fourier;
use crate::trajectory::Trajectory;

/// `||f||_2^2`.
pub fn mass(f: &Field) -> f64 {
    f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * f.grid().cell_volume()
}

/// `||f||_2`.
pub fn l2(f: &Field) -> f64 {
    mass(f).sqrt()
}

/// `||f||_{L^r}` for `r` in `[1, inf]`; `f64::INFINITY` selects the max norm.
pub fn lebesgue(f: &Field, r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "Lebesgue exponent must lie in [1, inf]",
        });
    }
    if r.is_infinite() {
        return Ok(f.values().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let s: f64 = f.values().iter().map(|z| z.norm().powf(r)).sum();
    Ok((s * f.grid().cell_volume()).powf(1.0 / r))
}

/// `||f||_{H^s} = ((2 pi)^-d int (1 + |xi|^2)^s |f^|^2 dxi)^1/2`.
pub fn h_s(f: &Field, s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "Sobolev index must be nonnegative",
        });
    }
    if s == 0.0 {
        return Ok(l2(f));
    }
    let spec = Fourier::new(f.grid()).to_frequency(f);
    let xi2 = f.grid().xi_squared();
    let sum: f64 = spec
        .values()
        .iter()
        .zip(&xi2)
        .map(|(z, k2)| (1.0 + k2).powf(s) * z.norm_sqr())
        .sum();
    Ok((sum / f.grid().box_length().powi(f.grid().dim() as i32)).sqrt())
}

/// Fraction of mass within `L/16` of the box boundary (any axis); a leak monitor for
/// the periodic truncation of the whole space.
pub fn boundary_mass_fraction(f: &Field) -> f64 {
    let total = mass(f);
    if total == 0.0 {
        return 0.0;
    }
    let g = f.grid();
    let edge = 0.5 * g.box_length() - g.box_length() / 16.0;
    let dim = g.dim();
    let outer: f64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let x = g.position(*i);
            x[..dim].iter().any(|c| c.abs() >= edge)
        })
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        * g.cell_volume();
    outer / total
}

/// `|| ||u(t)||_{L^r_x} ||_{L^q_t}` over the stored snapshots, composite trapezoid in
/// time; `q` or `r` infinite use the max.
pub fn spacetime_norm(traj: &Trajectory, q: f64, r: f64) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "time exponent must lie in [1, inf]",
        });
    }
    let spatial = traj
        .snapshots()
        .iter()
        .map(|f| lebesgue(f, r))
        .collect::<Result<Vec<f64>>>()?;
    if q.is_infinite() {
        return Ok(spatial.iter().copied().fold(0.0, f64::max));
    }
    let powered: Vec<f64> = spatial.iter().map(|a| a.powf(q)).collect();
    Ok(trapezoid(traj.times(), &powered).powf(1.0 / q))
}

/// Composite trapezoid rule on (possibly nonuniform) nodes.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}
