//! Free Schrödinger propagators `exp(i c tau Delta)`.

use num_complex::Complex64;

use crate::field::Field;
use crate::fourier::Fourier;
use crate::grid::Grid;

/// Reusable free propagator on one grid: frequency-side multiplication by
/// `exp(-i c tau |xi|^2)`.
#[derive(Debug, Clone)]
pub struct FreePropagator {
    fourier: Fourier,
    xi2: Vec<f64>,
}

impl FreePropagator {
    pub fn new(grid: &Grid) -> Self {
        Self {
            fourier: Fourier::new(grid),
            xi2: grid.xi_squared(),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.fourier.grid()
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    /// `|xi|^2` in FFT order.
    pub fn xi_squared(&self) -> &[f64] {
        &self.xi2
    }

    /// Multiplies raw DFT coefficients by `exp(-i phase |xi|^2)` in place.
    pub fn apply_raw(&self, coeffs: &mut [Complex64], phase: f64) {
        if phase == 0.0 {
            return;
        }
        for (z, k2) in coeffs.iter_mut().zip(&self.xi2) {
            *z *= Complex64::from_polar(1.0, -phase * k2);
        }
    }

    /// `exp(i coeff tau Delta) f`.
    pub fn propagate(&self, f: &Field, tau: f64, coeff: f64) -> Field {
        assert_eq!(f.grid(), self.grid(), "grid mismatch");
        let phase = coeff * tau;
        if phase == 0.0 {
            return f.clone();
        }
        let mut c = self.fourier.raw_forward(f.values());
        self.apply_raw(&mut c, phase);
        let mut out = Field::from_raw(*f.grid(), self.fourier.raw_inverse(c));
        out.set_time(f.time());
        out
    }
}

/// `exp(i coeff tau Delta) f`; builds transform plans per call.
pub fn free_propagate(f: &Field, tau: f64, coeff: f64) -> Field {
    FreePropagator::new(f.grid()).propagate(f, tau, coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::l2;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_time_is_identity() {
        let g = Grid::new(1, 64, 10.0).unwrap();
        let f = Field::gaussian(g, 1.0, 1.0);
        assert_eq!(free_propagate(&f, 0.0, 1.0), f);
    }

    #[test]
    fn single_mode_picks_up_phase() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let k = 5i64;
        let f = Field::plane_wave(g, [k, 0], Complex64::new(1.0, 0.0));
        let (tau, c) = (0.3, 1.7);
        let out = free_propagate(&f, tau, c);
        let expected = f.scaled(Complex64::from_polar(1.0, -c * tau * (k * k) as f64));
        let err = out
            .sub(&expected)
            .values()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    /// Closed form `(1 + 2 i tau)^-1/2 exp(-x^2 / (2 (1 + 2 i tau)))` solves
    /// `i u_t + u_xx = 0`; checked by finite-difference residual before comparison.
    #[test]
    fn gaussian_matches_closed_form() {
        let exact = |t: f64, x: f64| {
            let a = Complex64::new(1.0, 2.0 * t);
            a.powf(-0.5) * (-(x * x) / (2.0 * a)).exp()
        };
        // residual of the closed form at a few points
        let h = 1e-4;
        for &(t, x) in &[(0.3, 0.2), (0.7, -1.1), (1.0, 2.5)] {
            let ut = (exact(t + h, x) - exact(t - h, x)) / (2.0 * h);
            let uxx = (exact(t, x + h) - 2.0 * exact(t, x) + exact(t, x - h)) / (h * h);
            let res = Complex64::i() * ut + uxx;
            assert!(res.norm() < 1e-5, "residual {res}");
        }
        let g = Grid::new(1, 1024, 80.0 * PI).unwrap();
        let f = Field::gaussian(g, 1.0, 1.0);
        let prop = FreePropagator::new(&g);
        for t in [0.25, 0.5, 1.0] {
            let u = prop.propagate(&f, t, 1.0);
            let e = Field::from_fn(g, |x| exact(t, x[0]));
            let rel = l2(&u.sub(&e)) / l2(&e);
            assert!(rel < 1e-12, "t={t}: {rel}");
        }
    }

    fn small_random_field() -> impl Strategy<Value = Field> {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64).prop_map(|v| {
            let g = Grid::new(1, 64, 9.0).unwrap();
            Field::new(
                g,
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn unitary_and_group_law(f in small_random_field(), a in -3.0..3.0f64, b in -3.0..3.0f64, c in -2.0..2.0f64) {
            let p = FreePropagator::new(f.grid());
            let n0 = l2(&f);
            let fa = p.propagate(&f, a, c);
            prop_assert!((l2(&fa) - n0).abs() <= 1e-12 * n0);
            let fab = p.propagate(&fa, b, c);
            let direct = p.propagate(&f, a + b, c);
            prop_assert!(l2(&fab.sub(&direct)) <= 1e-12 * n0);
            let back = p.propagate(&fa, -a, c);
            prop_assert!(l2(&back.sub(&f)) <= 1e-12 * n0);
        }
    }
}
