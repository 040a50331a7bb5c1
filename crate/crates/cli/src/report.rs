//! Run directory layout and deterministic table output.

use std::path::{Path, PathBuf};

use anyhow::Context;
use dmnls_core::norms::{boundary_mass_fraction, h_s, lebesgue, mass};
use dmnls_core::Trajectory;

use crate::snapshot;

/// Numbers in tables: plain notation in `[1e-4, 1e6)`, otherwise shortest exponent form.
/// Both are the shortest strings that parse back to the same bits.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("cannot create run directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_csv(
        &self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> anyhow::Result<()> {
        let path = self.root.join(name);
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, name: &str, value: &serde_json::Value) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(self.root.join(name), text + "\n")?;
        Ok(())
    }

    /// `diag.csv` plus `snapshots/t_<index>.dmnls` for every stored time.
    pub fn write_trajectory(&self, traj: &Trajectory) -> anyhow::Result<()> {
        let snaps = self.root.join("snapshots");
        std::fs::create_dir_all(&snaps)?;
        let mut rows = Vec::with_capacity(traj.len());
        for (i, (t, f)) in traj.times().iter().zip(traj.snapshots()).enumerate() {
            rows.push(vec![
                num(*t),
                num(mass(f)),
                num(h_s(f, 1.0)?),
                num(lebesgue(f, f64::INFINITY)?),
                num(boundary_mass_fraction(f)),
            ]);
            snapshot::write(&snaps.join(snapshot_name(i)), f, *t)?;
        }
        self.write_csv(
            "diag.csv",
            &["t", "mass", "H1", "Linf", "boundary_leak"],
            &rows,
        )
    }
}

pub fn snapshot_name(index: usize) -> String {
    format!("t_{index:06}.dmnls")
}

/// Snapshots of a run directory in index order.
pub fn read_trajectory(dir: &Path) -> anyhow::Result<Trajectory> {
    let snaps = if dir.join("snapshots").is_dir() {
        dir.join("snapshots")
    } else {
        dir.to_path_buf()
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&snaps)
        .with_context(|| format!("cannot list {}", snaps.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dmnls"))
        .collect();
    paths.sort();
    let mut traj = Trajectory::new();
    for p in paths {
        let (f, t) = snapshot::read(&p).with_context(|| format!("reading {}", p.display()))?;
        traj.push(t, f)?;
    }
    anyhow::ensure!(!traj.is_empty(), "no snapshots under {}", snaps.display());
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, 1e-7, 3.25e8, 0.1, 1.0 / 3.0, 123456.789] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(0.5), "0.5");
    }
}
