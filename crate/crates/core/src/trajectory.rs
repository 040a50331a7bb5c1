//! Time-ordered snapshot sequences.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::norms::{boundary_mass_fraction, mass};

/// Scalar record kept alongside every snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub mass: f64,
    pub boundary_fraction: f64,
}

impl Diagnostic {
    pub fn of(f: &Field) -> Self {
        Self {
            mass: mass(f),
            boundary_fraction: boundary_mass_fraction(f),
        }
    }
}

/// Snapshots `u(t_k)` at strictly increasing times on a single grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    snapshots: Vec<Field>,
    diagnostics: Vec<Diagnostic>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a trajectory from parallel vectors, checking the invariants.
    pub fn from_parts(times: Vec<f64>, snapshots: Vec<Field>) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                got: snapshots.len(),
            });
        }
        let mut traj = Self::new();
        for (t, f) in times.into_iter().zip(snapshots) {
            traj.push(t, f)?;
        }
        Ok(traj)
    }

    /// Appends `u(t)`; `t` must exceed the last time and the grid must match.
    pub fn push(&mut self, t: f64, field: Field) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                reason: "snapshot time must be finite",
            });
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidParameter {
                    name: "t",
                    value: t,
                    reason: "snapshot times must be strictly increasing",
                });
            }
            if self.snapshots[0].grid() != field.grid() {
                return Err(Error::GridMismatch);
            }
        }
        if !field.is_finite() {
            return Err(Error::NonFinite);
        }
        self.diagnostics.push(Diagnostic::of(&field));
        self.times.push(t);
        self.snapshots.push(field.with_time(t));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.snapshots.first().map(|f| f.grid())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn last(&self) -> Option<(f64, &Field)> {
        Some((*self.times.last()?, self.snapshots.last()?))
    }

    /// `max_k |mass(u(t_k)) - mass(u(t_0))| / mass(u(t_0))`; zero for zero data.
    pub fn max_relative_mass_drift(&self) -> f64 {
        let Some(first) = self.diagnostics.first() else {
            return 0.0;
        };
        if first.mass == 0.0 {
            return 0.0;
        }
        self.diagnostics
            .iter()
            .map(|d| (d.mass - first.mass).abs() / first.mass)
            .fold(0.0, f64::max)
    }

    /// Applies `op` to every snapshot, keeping the times.
    pub fn map(&self, mut op: impl FnMut(f64, &Field) -> Field) -> Result<Trajectory> {
        let mut out = Trajectory::new();
        for (t, f) in self.times.iter().zip(&self.snapshots) {
            out.push(*t, op(*t, f))?;
        }
        Ok(out)
    }
}
