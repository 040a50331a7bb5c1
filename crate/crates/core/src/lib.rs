//! Spectral simulation and estimate probes for the dispersion-managed nonlinear
//! Schrödinger equation
//!
//! ```text
//! i u_t + d_av Delta u + int_0^1 exp(-i r Delta)(|exp(i r Delta) u|^(2 sigma) exp(i r Delta) u) dr = 0
//! ```
//!
//! and its fast-oscillating parent `i u_t + d(t) Delta u + |u|^(2 sigma) u = 0` with
//! `d(t) = d_av + d_0(t / eps) / eps`.
//!
//! The whole space is replaced by a periodic box ([`Grid`]). Fields are complex
//! samples on that box ([`Field`]); every solver works with exact Fourier-side free
//! propagators.

pub mod analysis;
pub mod dyadic;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod integrators;
pub mod nonlinearity;
pub mod norms;
pub mod propagator;
pub mod quadrature;
pub mod trajectory;

pub use dyadic::{dyadic_project, DyadicLadder};
pub use error::{Error, Result};
pub use field::{Field, Spectrum};
pub use fourier::{to_frequency, to_physical, Fourier};
pub use grid::{make_grid, Grid};
pub use integrators::{
    picard_solve, solve_averaged, solve_original, step_averaged, step_original, DispersionMap,
    EvolutionParams, PicardOptions, PicardReport,
};
pub use nonlinearity::{
    averaged_nonlinearity, local_nonlinearity, trilinear_averaged, DealiasPolicy, Nonlinearity,
    NonlinearityParams,
};
pub use propagator::{free_propagate, FreePropagator};
pub use trajectory::{Diagnostic, Trajectory};
