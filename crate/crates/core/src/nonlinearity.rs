//! Averaged (nonlocal in time) and local power nonlinearities.
//!
//! The averaged nonlinearity is
//!
//! ```text
//! F(u) = int_0^1 exp(-i r Delta) ( |exp(i r Delta) u|^(2 sigma) exp(i r Delta) u ) dr
//! ```
//!
//! evaluated with a Gauss–Legendre rule in `r`. Products are formed on a zero-padded
//! grid (factor `sigma + 1` for integer `sigma`), which removes aliasing exactly;
//! non-integer powers fall back to an exponential spectral filter.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fourier::{FftPlan, Fourier};
use crate::grid::Grid;
use crate::quadrature::gauss_legendre_unit;

/// How products are protected against aliasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DealiasPolicy {
    /// Zero-pad; exact for integer `sigma`, filtered otherwise.
    #[default]
    Pad,
    /// Zero-pad and refuse powers that cannot be de-aliased exactly.
    Strict,
    /// Evaluate on the native grid.
    Off,
}

impl DealiasPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            DealiasPolicy::Pad => "pad",
            DealiasPolicy::Strict => "strict",
            DealiasPolicy::Off => "off",
        }
    }
}

impl std::str::FromStr for DealiasPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pad" => Ok(Self::Pad),
            "strict" => Ok(Self::Strict),
            "off" => Ok(Self::Off),
            other => Err(format!("unknown dealias policy `{other}` (pad|strict|off)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityParams {
    /// Power `sigma > 0`; mass-critical is `2/d`.
    pub sigma: f64,
    /// Gauss–Legendre nodes on `r in [0, 1]`.
    pub quad_nodes: usize,
    pub dealias: DealiasPolicy,
}

impl NonlinearityParams {
    pub fn new(sigma: f64, quad_nodes: usize) -> Self {
        Self {
            sigma,
            quad_nodes,
            dealias: DealiasPolicy::Pad,
        }
    }

    /// `sigma = 2/d`, 32 nodes.
    pub fn mass_critical(dim: usize) -> Self {
        Self::new(2.0 / dim as f64, 32)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: self.sigma,
                reason: "power must be positive",
            });
        }
        if self.quad_nodes < 2 {
            return Err(Error::InvalidParameter {
                name: "quad_nodes",
                value: self.quad_nodes as f64,
                reason: "need at least two quadrature nodes",
            });
        }
        Ok(())
    }
}

fn integer_power(sigma: f64) -> Option<i32> {
    let r = sigma.round();
    if (sigma - r).abs() < 1e-12 && r >= 1.0 {
        Some(r as i32)
    } else {
        None
    }
}

/// Precomputed evaluator for one grid and parameter set.
///
/// Holds transform plans, the quadrature rule, and the per-node multipliers
/// `exp(-i r_q |xi|^2)`; evaluation allocates only per call.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    grid: Grid,
    sigma: f64,
    power: Option<i32>,
    fourier: Fourier,
    padded: FftPlan,
    pad_index: Vec<usize>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    multipliers: Vec<Vec<Complex64>>,
    filter: Option<Vec<f64>>,
}

impl Nonlinearity {
    /// Averaged nonlinearity with `params.quad_nodes` Gauss–Legendre nodes.
    pub fn averaged(grid: &Grid, params: &NonlinearityParams) -> Result<Self> {
        params.validate()?;
        let (nodes, weights) = gauss_legendre_unit(params.quad_nodes);
        Self::build(grid, params.sigma, params.dealias, nodes, weights)
    }

    /// Pointwise `|u|^(2 sigma) u` with the same de-aliasing machinery.
    pub fn local(grid: &Grid, sigma: f64, dealias: DealiasPolicy) -> Result<Self> {
        NonlinearityParams {
            sigma,
            quad_nodes: 2,
            dealias,
        }
        .validate()?;
        Self::build(grid, sigma, dealias, vec![0.0], vec![1.0])
    }

    fn build(
        grid: &Grid,
        sigma: f64,
        dealias: DealiasPolicy,
        nodes: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let power = integer_power(sigma);
        if dealias == DealiasPolicy::Strict && power.is_none() {
            return Err(Error::AliasingUnavoidable(sigma));
        }
        let n = grid.n();
        let factor = match dealias {
            DealiasPolicy::Off => 1,
            _ => sigma.ceil().max(1.0) as usize + 1,
        };
        let m = factor * n;
        let axis: Vec<usize> = (0..n)
            .map(|i| {
                let k = grid.wavenumber(i);
                if k >= 0 {
                    k as usize
                } else {
                    (k + m as i64) as usize
                }
            })
            .collect();
        let pad_index = match grid.dim() {
            1 => axis,
            _ => {
                let mut v = Vec::with_capacity(n * n);
                for a in &axis {
                    for b in &axis {
                        v.push(a * m + b);
                    }
                }
                v
            }
        };
        let xi2 = grid.xi_squared();
        let multipliers = nodes
            .iter()
            .map(|&r| {
                xi2.iter()
                    .map(|k2| Complex64::from_polar(1.0, -r * k2))
                    .collect()
            })
            .collect();
        let filter = if power.is_none() && dealias != DealiasPolicy::Off {
            Some(exponential_filter(grid))
        } else {
            None
        };
        Ok(Self {
            grid: *grid,
            sigma,
            power,
            fourier: Fourier::new(grid),
            padded: FftPlan::new(grid.dim(), m),
            pad_index,
            nodes,
            weights,
            multipliers,
            filter,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check(&self, f: &Field) -> Result<()> {
        if *f.grid() != self.grid {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }

    fn pad(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded.len()];
        for (c, &i) in coeffs.iter().zip(&self.pad_index) {
            buf[i] = *c;
        }
        buf
    }

    fn truncate(&self, buf: &[Complex64], scale: f64) -> Vec<Complex64> {
        self.pad_index.iter().map(|&i| buf[i] * scale).collect()
    }

    fn to_padded_physical(&self, coeffs: &[Complex64], node: usize) -> Vec<Complex64> {
        let mult = &self.multipliers[node];
        let shifted: Vec<Complex64> = coeffs.iter().zip(mult).map(|(c, e)| c * e).collect();
        let mut buf = self.pad(&shifted);
        self.padded.inverse(&mut buf);
        let s = (self.grid.len() as f64).recip();
        for z in buf.iter_mut() {
            *z *= s;
        }
        buf
    }

    fn back_to_coeffs(&self, mut buf: Vec<Complex64>, node: usize) -> Vec<Complex64> {
        self.padded.forward(&mut buf);
        let scale = self.grid.len() as f64 / self.padded.len() as f64 * self.weights[node];
        let mult = &self.multipliers[node];
        self.truncate(&buf, scale)
            .into_iter()
            .zip(mult)
            .map(|(c, e)| c * e.conj())
            .collect()
    }

    fn sum_nodes(&self, contributions: Vec<Vec<Complex64>>) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for c in contributions {
            for (a, b) in acc.iter_mut().zip(c) {
                *a += b;
            }
        }
        if let Some(filter) = &self.filter {
            for (a, w) in acc.iter_mut().zip(filter) {
                *a *= *w;
            }
        }
        acc
    }

    fn power(&self, z: Complex64) -> Complex64 {
        let m2 = z.norm_sqr();
        match self.power {
            Some(p) => z * m2.powi(p),
            None => z * m2.powf(self.sigma),
        }
    }

    /// `F(u)` on raw DFT coefficients (see [`crate::fourier::FftPlan`]).
    pub fn apply_raw(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let contributions: Vec<Vec<Complex64>> = (0..self.nodes.len())
            .into_par_iter()
            .map(|q| {
                let mut v = self.to_padded_physical(coeffs, q);
                for z in v.iter_mut() {
                    *z = self.power(*z);
                }
                self.back_to_coeffs(v, q)
            })
            .collect();
        self.sum_nodes(contributions)
    }

    /// Trilinear form `int exp(-irD)(exp(irD)u1 conj(exp(irD)u2) exp(irD)u3) dr` on raw
    /// coefficients.
    pub fn trilinear_raw(
        &self,
        c1: &[Complex64],
        c2: &[Complex64],
        c3: &[Complex64],
    ) -> Vec<Complex64> {
        let contributions: Vec<Vec<Complex64>> = (0..self.nodes.len())
            .into_par_iter()
            .map(|q| {
                let v1 = self.to_padded_physical(c1, q);
                let v2 = self.to_padded_physical(c2, q);
                let v3 = self.to_padded_physical(c3, q);
                let prod = v1
                    .iter()
                    .zip(&v2)
                    .zip(&v3)
                    .map(|((a, b), c)| a * b.conj() * c)
                    .collect();
                self.back_to_coeffs(prod, q)
            })
            .collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for c in contributions {
            for (a, b) in acc.iter_mut().zip(c) {
                *a += b;
            }
        }
        acc
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        let c = self.fourier.raw_forward(u.values());
        let out = self.fourier.raw_inverse(self.apply_raw(&c));
        Ok(Field::from_raw(self.grid, out))
    }

    pub fn trilinear(&self, u1: &Field, u2: &Field, u3: &Field) -> Result<Field> {
        self.check(u1)?;
        self.check(u2)?;
        self.check(u3)?;
        let c1 = self.fourier.raw_forward(u1.values());
        let c2 = self.fourier.raw_forward(u2.values());
        let c3 = self.fourier.raw_forward(u3.values());
        let out = self.fourier.raw_inverse(self.trilinear_raw(&c1, &c2, &c3));
        Ok(Field::from_raw(self.grid, out))
    }
}

/// `exp(-36 (|k| / k_nyq)^36)` per axis, FFT order.
fn exponential_filter(grid: &Grid) -> Vec<f64> {
    let half = (grid.n() / 2) as f64;
    let axis: Vec<f64> = (0..grid.n())
        .map(|m| {
            let r = grid.wavenumber(m).unsigned_abs() as f64 / half;
            (-36.0 * r.powi(36)).exp()
        })
        .collect();
    match grid.dim() {
        1 => axis,
        _ => {
            let mut v = Vec::with_capacity(grid.len());
            for a in &axis {
                for b in &axis {
                    v.push(a * b);
                }
            }
            v
        }
    }
}

/// Averaged nonlinearity of `u`; builds an evaluator per call.
pub fn averaged_nonlinearity(u: &Field, params: &NonlinearityParams) -> Result<Field> {
    Nonlinearity::averaged(u.grid(), params)?.apply(u)
}

/// Trilinear polarization of the cubic averaged nonlinearity; `params.sigma` only
/// affects the padding factor.
pub fn trilinear_averaged(
    u1: &Field,
    u2: &Field,
    u3: &Field,
    params: &NonlinearityParams,
) -> Result<Field> {
    u1.check_same_grid(u2)?;
    u1.check_same_grid(u3)?;
    Nonlinearity::averaged(u1.grid(), params)?.trilinear(u1, u2, u3)
}

/// Pointwise `|u|^(2 sigma) u`, de-aliased by padding.
pub fn local_nonlinearity(u: &Field, sigma: f64) -> Result<Field> {
    Nonlinearity::local(u.grid(), sigma, DealiasPolicy::Pad)?.apply(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::l2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid_2pi(n: usize) -> Grid {
        Grid::new(1, n, 2.0 * PI).unwrap()
    }

    fn max_err(a: &Field, b: &Field) -> f64 {
        a.sub(b)
            .values()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_mode_is_a_pure_power() {
        for sigma in [1.0, 2.0] {
            for dim in [1usize, 2] {
                let g = Grid::new(dim, 32, 2.0 * PI).unwrap();
                let a = Complex64::new(0.7, -0.4);
                let u = Field::plane_wave(g, [3, -2], a);
                let p = NonlinearityParams::new(sigma, 8);
                let out = averaged_nonlinearity(&u, &p).unwrap();
                let expected = u.scaled(Complex64::new(a.norm().powf(2.0 * sigma), 0.0));
                assert!(max_err(&out, &expected) < 1e-13, "sigma {sigma} dim {dim}");
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = grid_2pi(32);
        let out =
            averaged_nonlinearity(&Field::zeros(g), &NonlinearityParams::new(2.0, 4)).unwrap();
        assert!(out.values().iter().all(|z| z.norm() == 0.0));
    }

    /// Exact oracle for trigonometric polynomials with sigma = 1: every triple of modes
    /// contributes `a1 conj(a2) a3 (exp(i W) - 1) / (i W)` at `k = k1 - k2 + k3`,
    /// `W = k^2 - k1^2 + k2^2 - k3^2`.
    fn cubic_mode_oracle(g: Grid, modes: &[(i64, Complex64)]) -> Field {
        let mut out = Field::zeros(g);
        for &(k1, a1) in modes {
            for &(k2, a2) in modes {
                for &(k3, a3) in modes {
                    let k = k1 - k2 + k3;
                    let w = (k * k - k1 * k1 + k2 * k2 - k3 * k3) as f64;
                    let avg = if w == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w)
                    };
                    out = out.add(&Field::plane_wave(g, [k, 0], a1 * a2.conj() * a3 * avg));
                }
            }
        }
        out
    }

    #[test]
    fn two_mode_cubic_matches_exact_and_dense_quadrature() {
        let g = grid_2pi(64);
        let modes = [
            (1i64, Complex64::new(1.0, 0.0)),
            (3i64, Complex64::new(1.0, 0.0)),
        ];
        let u =
            Field::plane_wave(g, [1, 0], modes[0].1).add(&Field::plane_wave(g, [3, 0], modes[1].1));
        let exact = cubic_mode_oracle(g, &modes);
        let dense = averaged_nonlinearity(&u, &NonlinearityParams::new(1.0, 512)).unwrap();
        assert!(max_err(&dense, &exact) < 1e-12);
        let moderate = averaged_nonlinearity(&u, &NonlinearityParams::new(1.0, 24)).unwrap();
        assert!(max_err(&moderate, &dense) < 1e-10);
    }

    fn random_band(g: Grid, kmax: i64, seed: u64) -> (Field, Vec<(i64, Complex64)>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = Field::zeros(g);
        let mut modes = Vec::new();
        for k in -kmax..=kmax {
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            u = u.add(&Field::plane_wave(g, [k, 0], a));
            modes.push((k, a));
        }
        (u, modes)
    }

    #[test]
    fn random_trig_polynomial_matches_exact_oracle() {
        let g = grid_2pi(64);
        let (u, modes) = random_band(g, 2, 17);
        let exact = cubic_mode_oracle(g, &modes);
        let out = averaged_nonlinearity(&u, &NonlinearityParams::new(1.0, 32)).unwrap();
        assert!(max_err(&out, &exact) < 1e-10 * l2(&exact));
    }

    #[test]
    fn phase_equivariance_and_realness() {
        let g = grid_2pi(64);
        let (u, _) = random_band(g, 3, 4);
        let p = NonlinearityParams::new(2.0, 16);
        let nl = Nonlinearity::averaged(&g, &p).unwrap();
        let f = nl.apply(&u).unwrap();
        let theta = Complex64::from_polar(1.0, 0.83);
        let rotated = nl.apply(&u.scaled(theta)).unwrap();
        assert!(l2(&rotated.sub(&f.scaled(theta))) <= 1e-12 * l2(&f));
        let ip = f.inner(&u);
        assert!(ip.im.abs() <= 1e-10 * ip.norm());
    }

    #[test]
    fn translation_equivariance() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = Field::gaussian(g, 0.8, 1.0).add(&Field::plane_wave(
            g,
            [2, 1],
            Complex64::new(0.2, 0.1),
        ));
        let nl = Nonlinearity::averaged(&g, &NonlinearityParams::new(1.0, 12)).unwrap();
        let a = nl.apply(&u.roll([3, -5])).unwrap();
        let b = nl.apply(&u).unwrap().roll([3, -5]);
        assert!(l2(&a.sub(&b)) <= 1e-12 * l2(&b));
    }

    #[test]
    fn trilinear_diagonal_and_linearity() {
        let g = grid_2pi(64);
        let (u, _) = random_band(g, 3, 8);
        let (v, _) = random_band(g, 3, 9);
        let (w, _) = random_band(g, 3, 10);
        let p = NonlinearityParams::new(1.0, 20);
        let diag = trilinear_averaged(&u, &u, &u, &p).unwrap();
        let direct = averaged_nonlinearity(&u, &p).unwrap();
        assert!(l2(&diag.sub(&direct)) <= 1e-12 * l2(&direct));
        let zero = trilinear_averaged(&u, &Field::zeros(g), &w, &p).unwrap();
        assert!(l2(&zero) == 0.0);
        let alpha = Complex64::new(-0.3, 1.7);
        let lhs = trilinear_averaged(&u.scaled(alpha), &v, &w, &p).unwrap();
        let rhs = trilinear_averaged(&u, &v, &w, &p).unwrap().scaled(alpha);
        assert!(l2(&lhs.sub(&rhs)) <= 1e-12 * l2(&rhs));
        // conjugate-linear in the middle slot
        let mid = trilinear_averaged(&u, &v.scaled(alpha), &w, &p).unwrap();
        let rhs2 = trilinear_averaged(&u, &v, &w, &p)
            .unwrap()
            .scaled(alpha.conj());
        assert!(l2(&mid.sub(&rhs2)) <= 1e-12 * l2(&rhs2));
    }

    #[test]
    fn trilinear_rejects_grid_mismatch() {
        let p = NonlinearityParams::new(1.0, 4);
        let a = Field::zeros(grid_2pi(32));
        let b = Field::zeros(grid_2pi(64));
        assert_eq!(trilinear_averaged(&a, &b, &a, &p), Err(Error::GridMismatch));
    }

    #[test]
    fn local_power_examples() {
        let g = grid_2pi(32);
        let a = Complex64::new(0.5, 0.5);
        let u = Field::plane_wave(g, [4, 0], a);
        let out = local_nonlinearity(&u, 2.0).unwrap();
        assert!(max_err(&out, &u.scaled(Complex64::new(a.norm().powi(4), 0.0))) < 1e-13);
        let c = Field::from_fn(g, |_| Complex64::new(1.3, 0.0));
        let out = local_nonlinearity(&c, 1.0).unwrap();
        assert!(out
            .values()
            .iter()
            .all(|z| (z - Complex64::new(1.3f64.powi(3), 0.0)).norm() < 1e-13));
    }

    /// Oracle: direct DFT on a 4x oversampled grid, pointwise cube, direct DFT back,
    /// keep the native band.
    #[test]
    fn local_cubic_matches_oversampled_direct_dft() {
        let g = grid_2pi(16);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = Field::new(
            g,
            (0..16)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let n = 16usize;
        let m = 64usize;
        let coeff: Vec<(i64, Complex64)> = (0..n)
            .map(|j| {
                let k = g.wavenumber(j);
                let c: Complex64 = (0..n)
                    .map(|x| {
                        u.values()[x]
                            * Complex64::from_polar(
                                1.0,
                                -2.0 * PI * (k * x as i64) as f64 / n as f64,
                            )
                    })
                    .sum::<Complex64>()
                    / n as f64;
                (k, c)
            })
            .collect();
        let fine: Vec<Complex64> = (0..m)
            .map(|y| {
                let v: Complex64 = coeff
                    .iter()
                    .map(|(k, c)| {
                        c * Complex64::from_polar(1.0, 2.0 * PI * (*k * y as i64) as f64 / m as f64)
                    })
                    .sum();
                v * v.norm_sqr()
            })
            .collect();
        let expected: Vec<Complex64> = (0..n)
            .map(|x| {
                coeff
                    .iter()
                    .map(|(k, _)| {
                        let ck: Complex64 = (0..m)
                            .map(|y| {
                                fine[y]
                                    * Complex64::from_polar(
                                        1.0,
                                        -2.0 * PI * (*k * y as i64) as f64 / m as f64,
                                    )
                            })
                            .sum::<Complex64>()
                            / m as f64;
                        ck * Complex64::from_polar(
                            1.0,
                            2.0 * PI * (*k * x as i64) as f64 / n as f64,
                        )
                    })
                    .sum()
            })
            .collect();
        let out = local_nonlinearity(&u, 1.0).unwrap();
        let err = out
            .values()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn strict_policy_refuses_fractional_power() {
        let g = grid_2pi(32);
        let mut p = NonlinearityParams::new(1.5, 8);
        p.dealias = DealiasPolicy::Strict;
        assert_eq!(
            Nonlinearity::averaged(&g, &p).unwrap_err(),
            Error::AliasingUnavoidable(1.5)
        );
        p.dealias = DealiasPolicy::Pad;
        assert!(Nonlinearity::averaged(&g, &p).is_ok());
    }

    #[test]
    fn quadrature_error_shrinks_with_nodes() {
        let g = grid_2pi(64);
        let (u, _) = random_band(g, 2, 31);
        let eval = |q: usize| averaged_nonlinearity(&u, &NonlinearityParams::new(1.0, q)).unwrap();
        let mut prev = f64::INFINITY;
        for q in [4usize, 8, 16, 32] {
            let d = l2(&eval(q).sub(&eval(2 * q)));
            assert!(d <= prev, "q={q}: {d} > {prev}");
            prev = d;
        }
        assert!(prev < 1e-10);
    }
}
