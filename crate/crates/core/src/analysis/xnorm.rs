//! Dyadic, sup-in-time proxy for the adapted X-norm.
//!
//! The atomic `U^2` block norm is not computable; it is replaced by
//! `sup_t ||P_N exp(-i d_av t Delta) u(t)||_2`. Every report labels the value a proxy.

use crate::dyadic::DyadicLadder;
use crate::error::{Error, Result};
use crate::norms::l2;
use crate::propagator::FreePropagator;
use crate::trajectory::Trajectory;

/// Per-level breakdown of the proxy.
#[derive(Debug, Clone, PartialEq)]
pub struct XNormProxy {
    pub levels: Vec<u32>,
    /// `sup_t ||P_N w(t)||_2` per level.
    pub block_sups: Vec<f64>,
    pub s: f64,
    pub value: f64,
}

pub fn x_norm_proxy_blocks(
    traj: &Trajectory,
    s: f64,
    d_av: f64,
    ladder: &DyadicLadder,
) -> Result<XNormProxy> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "regularity weight must be nonnegative",
        });
    }
    let grid = traj.grid().ok_or(Error::EmptyTrajectory)?;
    if grid != ladder.grid() {
        return Err(Error::GridMismatch);
    }
    let prop = FreePropagator::new(grid);
    let mut sups = vec![0.0f64; ladder.levels().len()];
    for (t, f) in traj.times().iter().zip(traj.snapshots()) {
        let w = prop.propagate(f, *t, -d_av);
        for (sup, block) in sups.iter_mut().zip(ladder.decompose(&w)?) {
            *sup = sup.max(l2(&block));
        }
    }
    let value = ladder
        .levels()
        .iter()
        .zip(&sups)
        .map(|(&n, b)| (n as f64).powf(2.0 * s) * b * b)
        .sum::<f64>()
        .sqrt();
    Ok(XNormProxy {
        levels: ladder.levels().to_vec(),
        block_sups: sups,
        s,
        value,
    })
}

/// `(sum_N N^{2s} sup_t ||P_N exp(-i d_av t Delta) u(t)||_2^2)^(1/2)`.
pub fn x_norm_proxy(traj: &Trajectory, s: f64, d_av: f64, ladder: &DyadicLadder) -> Result<f64> {
    Ok(x_norm_proxy_blocks(traj, s, d_av, ladder)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::fourier::Fourier;
    use crate::grid::Grid;
    use num_complex::Complex64;

    fn free_trajectory(phi: &Field, d_av: f64) -> Trajectory {
        let prop = FreePropagator::new(phi.grid());
        let mut traj = Trajectory::new();
        for j in 0..6 {
            let t = 0.4 * j as f64;
            traj.push(t, prop.propagate(phi, t, d_av)).unwrap();
        }
        traj
    }

    #[test]
    fn zero_trajectory() {
        let g = Grid::new(1, 128, 40.0).unwrap();
        let ladder = DyadicLadder::new(&g).unwrap();
        let traj = free_trajectory(&Field::zeros(g), 1.0);
        assert_eq!(x_norm_proxy(&traj, 0.5, 1.0, &ladder).unwrap(), 0.0);
    }

    #[test]
    fn free_evolution_gives_block_sums() {
        let g = Grid::new(2, 64, 16.0).unwrap();
        let ladder = DyadicLadder::new(&g).unwrap();
        let phi = Field::from_fn(g, |x| {
            Complex64::from_polar((-(x[0] * x[0] + x[1] * x[1]) / 3.0).exp(), 1.2 * x[1])
        });
        let traj = free_trajectory(&phi, -0.7);
        let spec = Fourier::new(&g).to_frequency(&phi);
        let area = g.box_length().powi(2);
        let want: f64 = ladder
            .levels()
            .iter()
            .map(|&n| {
                spec.values()
                    .iter()
                    .zip(ladder.cutoff(n).unwrap())
                    .map(|(z, w)| (w * z.norm()).powi(2))
                    .sum::<f64>()
                    / area
            })
            .sum::<f64>()
            .sqrt();
        let got = x_norm_proxy(&traj, 0.0, -0.7, &ladder).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
    }

    #[test]
    fn single_mode_weight() {
        // |xi| = N0 is seen only by the level-N0 cutoff
        let g = Grid::new(1, 256, 8.0 * std::f64::consts::PI).unwrap();
        let ladder = DyadicLadder::new(&g).unwrap();
        let phi = Field::plane_wave(g, [16, 0], Complex64::new(0.5, 0.0));
        let traj = free_trajectory(&phi, 1.0);
        let rep = x_norm_proxy_blocks(&traj, 1.0, 1.0, &ladder).unwrap();
        let want = 4.0 * l2(&phi);
        assert!((rep.value - want).abs() < 1e-12 * want);
        assert!(x_norm_proxy(&traj, -1.0, 1.0, &ladder).is_err());
    }
}
