//! Discrete p-variation over all sub-partitions of a sample.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::l2;
use crate::propagator::FreePropagator;
use crate::trajectory::Trajectory;

/// Sample points `v(t_0), ..., v(t_{K-1})` given through their pairwise distances.
///
/// With the infinity marker a terminal point `v(+inf) := 0` is appended.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationSample {
    times: Vec<f64>,
    /// Row-major `K x K` matrix of `||v(t_i) - v(t_j)||`.
    dist: Vec<f64>,
    infinity: bool,
}

impl VariationSample {
    /// L2 distances between fields; `infinity` appends the zero field at `t = +inf`.
    pub fn from_fields(times: &[f64], fields: &[Field], infinity: bool) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                got: fields.len(),
            });
        }
        for w in fields.windows(2) {
            w[0].check_same_grid(&w[1])?;
        }
        let k = fields.len() + usize::from(infinity);
        let mut dist = vec![0.0; k * k];
        for i in 0..fields.len() {
            for j in (i + 1)..fields.len() {
                let d = l2(&fields[i].sub(&fields[j]));
                dist[i * k + j] = d;
                dist[j * k + i] = d;
            }
            if infinity {
                let d = l2(&fields[i]);
                dist[i * k + k - 1] = d;
                dist[(k - 1) * k + i] = d;
            }
        }
        Self::finish(times, dist, infinity)
    }

    /// Real-valued sample with `|a - b|` as distance.
    pub fn from_scalars(times: &[f64], values: &[f64], infinity: bool) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                got: values.len(),
            });
        }
        let mut v = values.to_vec();
        if infinity {
            v.push(0.0);
        }
        let k = v.len();
        let mut dist = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                dist[i * k + j] = (v[i] - v[j]).abs();
            }
        }
        Self::finish(times, dist, infinity)
    }

    /// Precomputed symmetric distance matrix (row-major, `K x K`), no infinity point.
    pub fn from_distances(times: &[f64], dist: Vec<f64>) -> Result<Self> {
        if dist.len() != times.len() * times.len() {
            return Err(Error::LengthMismatch {
                expected: times.len() * times.len(),
                got: dist.len(),
            });
        }
        Self::finish(times, dist, false)
    }

    fn finish(times: &[f64], dist: Vec<f64>, infinity: bool) -> Result<Self> {
        let mut times = times.to_vec();
        if infinity {
            times.push(f64::INFINITY);
        }
        if times.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: times.len(),
            });
        }
        if times
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::InvalidParameter {
                name: "times",
                value: f64::NAN,
                reason: "sample times must be strictly increasing",
            });
        }
        Ok(Self {
            times,
            dist,
            infinity,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn has_infinity(&self) -> bool {
        self.infinity
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 || p.is_infinite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "variation exponent must lie in [1, inf)",
        });
    }
    Ok(())
}

/// `best[j]`: the largest `sum_k ||v(t_k) - v(t_{k-1})||^p` over sub-partitions ending
/// at index `j`. Sums are accumulated left to right along the chosen path.
pub fn variation_profile(sample: &VariationSample, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    let k = sample.len();
    let mut best = vec![0.0f64; k];
    for j in 1..k {
        let mut m = 0.0f64;
        for (i, b) in best.iter().enumerate().take(j) {
            let cand = b + sample.distance(i, j).powf(p);
            if cand > m {
                m = cand;
            }
        }
        best[j] = m;
    }
    Ok(best)
}

/// `sup over sub-partitions (sum ||v(t_k) - v(t_{k-1})||^p)^(1/p)`, exact, `O(K^2)`.
pub fn p_variation(sample: &VariationSample, p: f64) -> Result<f64> {
    let best = variation_profile(sample, p)?;
    Ok(best.iter().copied().fold(0.0, f64::max).powf(1.0 / p))
}

/// First index `j` whose prefix variation satisfies `V_j^p >= V^p - eta^p`. Every
/// increment between indices `>= j` is then at most `eta`.
pub fn variation_tail_start(sample: &VariationSample, p: f64, eta: f64) -> Result<usize> {
    let best = variation_profile(sample, p)?;
    let total = best.iter().copied().fold(0.0, f64::max);
    let target = total - eta.powf(p);
    let mut prefix = 0.0f64;
    for (j, b) in best.iter().enumerate() {
        prefix = prefix.max(*b);
        if prefix >= target {
            return Ok(j);
        }
    }
    Ok(best.len() - 1)
}

/// p-variation of the pulled-back trajectory `exp(-i d_av t Delta) u(t)`.
pub fn vp_delta_norm(traj: &Trajectory, p: f64, d_av: f64, infinity: bool) -> Result<f64> {
    check_p(p)?;
    let grid = traj.grid().ok_or(Error::EmptyTrajectory)?;
    let prop = FreePropagator::new(grid);
    let pulled: Vec<Field> = traj
        .times()
        .iter()
        .zip(traj.snapshots())
        .map(|(t, f)| prop.propagate(f, *t, -d_av))
        .collect();
    let sample = VariationSample::from_fields(traj.times(), &pulled, infinity)?;
    p_variation(&sample, p)
}
