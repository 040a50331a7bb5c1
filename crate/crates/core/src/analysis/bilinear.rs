//! Bilinear Strichartz ratios for dyadically separated frequency blocks.
//!
//! Besides the full-grid version there is a carrier/envelope form: a [`Packet`] stores
//! `exp(i xi_c . x) env(x)` through a band-limited envelope on a coarse grid and an
//! integer carrier. Projections and free evolution only act through `|eta + xi_c|`,
//! and the product modulus `|f g| = |env_f env_g|` never needs the carrier, so high
//! frequencies cost nothing extra.

use num_complex::Complex64;

use crate::analysis::strichartz::TimeWindow;
use crate::dyadic::{rho_level, DyadicLadder};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fourier::Fourier;
use crate::grid::Grid;
use crate::integrators::raw_l2;
use crate::norms::trapezoid;

/// `1 + 2/d`.
pub fn bilinear_exponent(dim: usize) -> f64 {
    1.0 + 2.0 / dim as f64
}

/// `||exp(i d_av t D) P_N1 f . exp(i d_av t D) P_N2 g||_{L^p_{t,x}} / (||P_N1 f|| ||P_N2 g||)`
/// with `p = 1 + 2/d` over `[-T, T]` times the box; zero if a block vanishes.
pub fn bilinear_ratio(
    f: &Field,
    g: &Field,
    n1: u32,
    n2: u32,
    window: &TimeWindow,
    d_av: f64,
    ladder: &DyadicLadder,
) -> Result<f64> {
    f.check_same_grid(g)?;
    if f.grid() != ladder.grid() {
        return Err(Error::GridMismatch);
    }
    window.validate()?;
    let (p1, p2) = (ladder.position(n1)?, ladder.position(n2)?);
    let grid = *f.grid();
    let fourier = Fourier::new(&grid);
    let mut a = fourier.raw_forward(f.values());
    let mut b = fourier.raw_forward(g.values());
    ladder.apply_raw(p1, &mut a);
    ladder.apply_raw(p2, &mut b);
    let xi2 = grid.xi_squared();
    Ok(ratio_of_blocks(&fourier, &a, &xi2, &b, &xi2, window, d_av))
}

fn ratio_of_blocks(
    fourier: &Fourier,
    a: &[Complex64],
    xi2_a: &[f64],
    b: &[Complex64],
    xi2_b: &[f64],
    window: &TimeWindow,
    d_av: f64,
) -> f64 {
    let grid = fourier.grid();
    let denom = raw_l2(a, grid) * raw_l2(b, grid);
    if denom == 0.0 {
        return 0.0;
    }
    let p = bilinear_exponent(grid.dim());
    let times = window.times();
    let h = times[1] - times[0];
    // exp(-i d_av t |xi|^2) on the uniform time grid, advanced by one fixed step
    let start = |c: &[Complex64], xi2: &[f64]| -> (Vec<Complex64>, Vec<Complex64>) {
        c.iter()
            .zip(xi2)
            .map(|(z, k2)| {
                (
                    z * Complex64::from_polar(1.0, -d_av * times[0] * k2),
                    Complex64::from_polar(1.0, -d_av * h * k2),
                )
            })
            .unzip()
    };
    let (mut ca, step_a) = start(a, xi2_a);
    let (mut cb, step_b) = start(b, xi2_b);
    let mut slices = Vec::with_capacity(times.len());
    for j in 0..times.len() {
        if j > 0 {
            ca.iter_mut().zip(&step_a).for_each(|(z, w)| *z *= w);
            cb.iter_mut().zip(&step_b).for_each(|(z, w)| *z *= w);
        }
        let u = fourier.raw_inverse(ca.clone());
        let v = fourier.raw_inverse(cb.clone());
        let s: f64 = u
            .iter()
            .zip(&v)
            .map(|(x, y)| {
                let m2 = x.norm_sqr() * y.norm_sqr();
                if p == 2.0 {
                    m2
                } else if p == 3.0 {
                    m2 * m2.sqrt()
                } else {
                    m2.powf(0.5 * p)
                }
            })
            .sum();
        slices.push(s * grid.cell_volume());
    }
    trapezoid(&times, &slices).powf(1.0 / p) / denom
}

/// `exp(i xi_c . x) env(x)` with `xi_c = carrier * 2 pi / L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    envelope: Field,
    carrier: [i64; 2],
}

impl Packet {
    pub fn new(envelope: Field, carrier: [i64; 2]) -> Result<Self> {
        if envelope.grid().dim() == 1 && carrier[1] != 0 {
            return Err(Error::InvalidParameter {
                name: "carrier",
                value: carrier[1] as f64,
                reason: "a one-dimensional carrier has no second component",
            });
        }
        Ok(Self { envelope, carrier })
    }

    pub fn envelope(&self) -> &Field {
        &self.envelope
    }

    pub fn carrier(&self) -> [i64; 2] {
        self.carrier
    }

    /// `|eta + xi_c|^2` over the envelope grid, FFT order.
    fn shifted_xi2(&self) -> Vec<f64> {
        let g = self.envelope.grid();
        let dxi = g.dxi();
        let axis = |k: i64| -> Vec<f64> {
            (0..g.n())
                .map(|m| ((g.wavenumber(m) + k) as f64 * dxi).powi(2))
                .collect()
        };
        let ax = axis(self.carrier[0]);
        match g.dim() {
            1 => ax,
            _ => {
                let ay = axis(self.carrier[1]);
                let mut out = Vec::with_capacity(g.len());
                for a in &ax {
                    for b in &ay {
                        out.push(a + b);
                    }
                }
                out
            }
        }
    }

    /// The same function sampled on a finer grid of equal box length.
    pub fn to_field(&self, grid: &Grid) -> Result<Field> {
        let env_grid = *self.envelope.grid();
        if grid.dim() != env_grid.dim() || grid.box_length() != env_grid.box_length() {
            return Err(Error::GridMismatch);
        }
        let fourier = Fourier::new(&env_grid);
        let c = fourier.raw_forward(self.envelope.values());
        let dim = env_grid.dim();
        let parity = if (self.carrier[0] + self.carrier[1]).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let scale = parity * (grid.n() as f64 / env_grid.n() as f64).powi(dim as i32);
        let mut full = vec![Complex64::new(0.0, 0.0); grid.len()];
        let target = |m: usize, axis: usize| -> Result<usize> {
            let k = env_grid.wavenumber(m) + self.carrier[axis];
            grid.index_of(k).ok_or(Error::InvalidParameter {
                name: "carrier",
                value: k as f64,
                reason: "packet is not resolved on the target grid",
            })
        };
        for (idx, z) in c.iter().enumerate() {
            if *z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let dst = if dim == 1 {
                target(idx, 0)?
            } else {
                target(idx / env_grid.n(), 0)? * grid.n() + target(idx % env_grid.n(), 1)?
            };
            full[dst] = z * scale;
        }
        Field::new(*grid, Fourier::new(grid).raw_inverse(full))
    }
}

fn check_level(level: u32) -> Result<()> {
    if level == 0 || !level.is_power_of_two() {
        return Err(Error::LevelNotOnLadder(level));
    }
    Ok(())
}

/// [`bilinear_ratio`] for two packets on a common envelope grid.
pub fn bilinear_ratio_packets(
    f: &Packet,
    g: &Packet,
    n1: u32,
    n2: u32,
    window: &TimeWindow,
    d_av: f64,
) -> Result<f64> {
    f.envelope.check_same_grid(&g.envelope)?;
    check_level(n1)?;
    check_level(n2)?;
    window.validate()?;
    let fourier = Fourier::new(f.envelope.grid());
    let block = |p: &Packet, level: u32| {
        let xi2 = p.shifted_xi2();
        let mut c = fourier.raw_forward(p.envelope.values());
        for (z, k2) in c.iter_mut().zip(&xi2) {
            *z *= rho_level(level, k2.sqrt());
        }
        (c, xi2)
    };
    let (a, xa) = block(f, n1);
    let (b, xb) = block(g, n2);
    Ok(ratio_of_blocks(&fourier, &a, &xa, &b, &xb, window, d_av))
}
