//! Scenario runners. Each writes its files into a [`RunDir`] and returns a JSON summary.

use anyhow::{bail, Context};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use dmnls_core::analysis::{
    bilinear_scan, least_squares_slope, p_variation, scattering_profile, strichartz_scan,
    strichartz_window_profile, vp_delta_norm, BilinearScan, EstimateScanReport, StrichartzScan,
    TimeWindow, VariationSample,
};
use dmnls_core::integrators::SplitStepper;
use dmnls_core::norms::l2;
use dmnls_core::{
    free_propagate, picard_solve, solve_averaged, solve_original, DyadicLadder, EvolutionParams,
    Field, Grid, NonlinearityParams, PicardOptions, Trajectory,
};

use crate::config::{ConfigError, Initial, RunConfig};
use crate::report::{num, RunDir};
use crate::snapshot;

/// Band for the two-point error ratios of `average-check`.
pub const AVERAGING_BAND: (f64, f64) = (0.3, 0.7);
/// Slope above which a normalized scan counts as increasing.
pub const TREND_LIMIT: f64 = 0.05;
/// Relative residual below which `scatter` reports decay at the probe time.
pub const DECAY_LIMIT: f64 = 1e-3;

pub fn grid(cfg: &RunConfig) -> anyhow::Result<Grid> {
    Ok(Grid::new(cfg.dimension, cfg.n, cfg.box_length)?)
}

pub fn evolution_params(cfg: &RunConfig) -> EvolutionParams {
    let mut nl = NonlinearityParams::new(cfg.sigma, cfg.quad_nodes);
    nl.dealias = cfg.dealias;
    let mut p = EvolutionParams::averaged(cfg.d_av, cfg.dt, cfg.t_final, nl);
    p.eps = cfg.eps;
    p.snapshot_every = cfg.snapshot_every;
    p.dispersion = cfg.dispersion;
    p
}

/// Initial data; `amplitude` replaces the configured one for Gaussian and mode data.
pub fn initial_field(
    cfg: &RunConfig,
    grid: &Grid,
    amplitude: Option<f64>,
) -> anyhow::Result<Field> {
    Ok(match &cfg.initial {
        Initial::Gaussian {
            width,
            amplitude: a,
        } => Field::gaussian(*grid, *width, amplitude.unwrap_or(*a)),
        Initial::Mode { k, amplitude: a } => {
            Field::plane_wave(*grid, *k, Complex64::new(amplitude.unwrap_or(*a), 0.0))
        }
        Initial::File { path } => {
            let (f, _) =
                snapshot::read(path).with_context(|| format!("initial.path {}", path.display()))?;
            if f.grid() != grid {
                return Err(ConfigError::Invalid {
                    key: "initial.path".into(),
                    message: format!(
                        "file grid (dim {}, n {}, L {}) differs from the configured grid",
                        f.grid().dim(),
                        f.grid().n(),
                        f.grid().box_length()
                    ),
                }
                .into());
            }
            let mut f = f;
            f.set_time(None);
            f
        }
    })
}

fn amplitude_ladder(cfg: &RunConfig) -> Vec<f64> {
    if !cfg.amplitudes.is_empty() {
        return cfg.amplitudes.clone();
    }
    match &cfg.initial {
        Initial::Gaussian { amplitude, .. } | Initial::Mode { amplitude, .. } => vec![*amplitude],
        Initial::File { .. } => vec![f64::NAN],
    }
}

fn some_amplitude(a: f64) -> Option<f64> {
    (!a.is_nan()).then_some(a)
}

pub fn simulate(cfg: &RunConfig, out: &RunDir) -> anyhow::Result<serde_json::Value> {
    let g = grid(cfg)?;
    let u0 = initial_field(cfg, &g, None)?;
    let params = evolution_params(cfg);
    let traj = if cfg.eps > 0.0 {
        solve_original(&u0, &params)?
    } else {
        solve_averaged(&u0, &params)?
    };
    out.write_trajectory(&traj)?;
    let leak = traj
        .diagnostics()
        .iter()
        .map(|d| d.boundary_fraction)
        .fold(0.0, f64::max);
    Ok(json!({
        "equation": if cfg.eps > 0.0 { "original" } else { "averaged" },
        "snapshots": traj.len(),
        "t_last": traj.last().map(|(t, _)| t),
        "max_relative_mass_drift": traj.max_relative_mass_drift(),
        "max_boundary_leak": leak,
    }))
}

struct ScatterRun {
    amplitude: f64,
    norm0: f64,
    traj: Trajectory,
    residuals: Vec<(f64, f64)>,
    phi_plus: Field,
}

pub fn scatter(cfg: &RunConfig, out: &RunDir) -> anyhow::Result<serde_json::Value> {
    cfg.require_nonzero_average("scatter")?;
    let g = grid(cfg)?;
    let params = evolution_params(cfg);
    let mut params = params;
    params.eps = 0.0;
    let probe = cfg.scatter_probe_time.unwrap_or(0.5 * cfg.t_final);
    let runs = amplitude_ladder(cfg)
        .par_iter()
        .map(|&a| -> anyhow::Result<ScatterRun> {
            let u0 = initial_field(cfg, &g, some_amplitude(a))?;
            let traj = solve_averaged(&u0, &params)?;
            let prof = scattering_profile(&traj, cfg.d_av)?;
            Ok(ScatterRun {
                amplitude: a,
                norm0: l2(&u0),
                traj,
                residuals: prof.residuals,
                phi_plus: prof.phi_plus,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut sweep_rows = Vec::new();
    let mut sweep_points = Vec::new();
    let mut per_run = Vec::new();
    for run in &runs {
        let rel = |r: f64| if run.norm0 > 0.0 { r / run.norm0 } else { 0.0 };
        for (t, r) in &run.residuals {
            rows.push(vec![num(run.amplitude), num(*t), num(*r), num(rel(*r))]);
        }
        let near = |t: f64| {
            run.residuals
                .iter()
                .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
                .map(|x| x.1)
                .unwrap_or(0.0)
        };
        let probe_rel = rel(near(probe));
        let sweep_res = near(cfg.scatter_sweep_time);
        let tail: Vec<f64> = run
            .residuals
            .iter()
            .filter(|(t, _)| *t >= 0.25 * cfg.t_final)
            .map(|x| x.1)
            .collect();
        let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
        let decaying = nonincreasing && probe_rel <= DECAY_LIMIT;
        sweep_rows.push(vec![
            num(run.amplitude),
            num(run.norm0),
            num(probe_rel),
            num(sweep_res),
            nonincreasing.to_string(),
            decaying.to_string(),
        ]);
        if run.amplitude > 0.0 && sweep_res > 0.0 {
            sweep_points.push((run.amplitude.ln(), sweep_res.ln()));
        }
        per_run.push(json!({
            "amplitude": run.amplitude,
            "probe_relative_residual": probe_rel,
            "nonincreasing_after_quarter": nonincreasing,
            "decaying": decaying,
        }));
    }
    out.write_csv(
        "residuals.csv",
        &["amplitude", "t", "residual", "relative"],
        &rows,
    )?;
    out.write_csv(
        "sweep.csv",
        &[
            "amplitude",
            "norm0",
            "probe_relative",
            "sweep_residual",
            "nonincreasing",
            "decaying",
        ],
        &sweep_rows,
    )?;
    let first = &runs[0];
    out.write_trajectory(&first.traj)?;
    snapshot::write(
        &out.root().join("phi_plus.dmnls"),
        &first.phi_plus,
        f64::INFINITY,
    )?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = sweep_points.into_iter().unzip();
    Ok(json!({
        "probe_time": probe,
        "sweep_time": cfg.scatter_sweep_time,
        "decay_limit": DECAY_LIMIT,
        "runs": per_run,
        "sweep_exponent": least_squares_slope(&xs, &ys),
        "expected_exponent": 1.0 + 4.0 / cfg.dimension as f64,
        "non_decaying_flagged": runs.len() - per_run.iter().filter(|r| r["decaying"] == true).count(),
    }))
}

/// `||exp(-i D_0(t/eps) Delta) u_eps(t) - v(t)|| / ||u0||` at `t_final` for every `eps`.
pub fn average_check(cfg: &RunConfig, out: &RunDir) -> anyhow::Result<serde_json::Value> {
    if cfg.eps_ladder.len() < 2 {
        return Err(ConfigError::Invalid {
            key: "eps_ladder".into(),
            message: "needs at least two values".into(),
        }
        .into());
    }
    let g = grid(cfg)?;
    let u0 = initial_field(cfg, &g, None)?;
    let norm0 = l2(&u0);
    let mut base = evolution_params(cfg);
    base.eps = 0.0;
    base.snapshot_every = usize::MAX;
    let averaged = solve_averaged(&u0, &base)?;
    let (_, v) = averaged.last().context("empty averaged trajectory")?;
    let results = cfg
        .eps_ladder
        .par_iter()
        .map(|&eps| -> anyhow::Result<(f64, f64, f64, f64)> {
            let mut p = base;
            p.eps = eps;
            p.dt = eps / cfg.average_substeps as f64;
            let stepper = SplitStepper::new(&g, &p)?;
            let traj = stepper.solve(&u0, &p)?;
            let (t, u) = traj.last().context("empty trajectory")?;
            let fast = stepper.accumulated_dispersion(t) - cfg.d_av * t;
            let err = l2(&u.sub(&free_propagate(v, fast, 1.0)));
            Ok((eps, p.dt, fast, if norm0 > 0.0 { err / norm0 } else { err }))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for (i, (eps, dt, fast, err)) in results.iter().enumerate() {
        let ratio = (i > 0).then(|| err / results[i - 1].3);
        if let Some(r) = ratio {
            ratios.push(r);
        }
        rows.push(vec![
            num(*eps),
            num(*dt),
            num(*fast),
            num(*err),
            ratio.map(num).unwrap_or_default(),
        ]);
    }
    out.write_csv(
        "average.csv",
        &["eps", "dt", "fast_phase", "error", "ratio"],
        &rows,
    )?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = results
        .iter()
        .filter(|r| r.3 > 0.0)
        .map(|r| (r.0.ln(), r.3.ln()))
        .unzip();
    let in_band = ratios
        .iter()
        .filter(|r| (AVERAGING_BAND.0..=AVERAGING_BAND.1).contains(*r))
        .count();
    Ok(json!({
        "t_final": cfg.t_final,
        "errors": results.iter().map(|r| r.3).collect::<Vec<_>>(),
        "ratios": ratios,
        "ratios_in_band": in_band,
        "band": [AVERAGING_BAND.0, AVERAGING_BAND.1],
        "fitted_order": least_squares_slope(&xs, &ys),
    }))
}

fn scan_rows(rep: &EstimateScanReport) -> Vec<Vec<String>> {
    rep.rows
        .iter()
        .map(|r| {
            vec![
                r.n1.to_string(),
                r.n2.to_string(),
                r.seed.to_string(),
                num(r.ratio),
                num(r.normalized),
            ]
        })
        .collect()
}

fn write_scan(
    out: &RunDir,
    rep: &EstimateScanReport,
    extra: serde_json::Value,
) -> anyhow::Result<serde_json::Value> {
    out.write_csv(
        "scan.csv",
        &["N1", "N2", "seed", "ratio", "normalized"],
        &scan_rows(rep),
    )?;
    let mut summary = json!({
        "fitted_exponent": rep.fitted_exponent,
        "bound_exponent": rep.bound_exponent,
        "normalized_max": rep.normalized_max,
        "normalized_mean": rep.normalized_mean,
        "normalized_slope": rep.normalized_slope,
        "trend_limit": TREND_LIMIT,
        "no_increasing_trend": rep.normalized_slope <= TREND_LIMIT,
        "rows": rep.rows.len(),
    });
    if let (Some(s), Some(e)) = (summary.as_object_mut(), extra.as_object()) {
        s.extend(e.clone());
    }
    out.write_json("summary.json", &summary)?;
    Ok(summary)
}

pub fn bilinear_scan_config(cfg: &RunConfig) -> BilinearScan {
    BilinearScan {
        dim: cfg.dimension,
        box_length: cfg.scan_box_length,
        envelope_n: cfg.scan_envelope_n,
        separations: cfg.scan_separations.clone(),
        low_level: cfg.scan_low_level,
        seeds: cfg.scan_seeds,
        base_seed: cfg.seed,
        d_av: cfg.d_av,
        time_samples: cfg.scan_time_samples,
        envelope_width: cfg.scan_envelope_width,
        envelope_band: cfg.scan_envelope_band,
    }
}

pub fn run_bilinear_scan(cfg: &RunConfig, out: &RunDir) -> anyhow::Result<serde_json::Value> {
    let scan = bilinear_scan_config(cfg);
    let rep = bilinear_scan(&scan)?;
    write_scan(
        out,
        &rep,
        json!({
            "norm": format!("L^{}", 1.0 + 2.0 / cfg.dimension as f64),
            "separations": scan.separations,
            "seeds": scan.seeds,
        }),
    )
}

pub fn run_strichartz_scan(cfg: &RunConfig, out: &RunDir) -> anyhow::Result<serde_json::Value> {
    let g = Grid::new(cfg.dimension, cfg.n, cfg.strichartz_box_length)?;
    let levels = if cfg.strichartz_levels.is_empty() {
        DyadicLadder::new(&g)?.levels().to_vec()
    } else {
        cfg.strichartz_levels.clone()
    };
    if levels.len() < EstimateScanReport::MIN_SEPARATIONS {
        return Err(ConfigError::Invalid {
            key: "strichartz.levels".into(),
            message: format!(
                "need at least {} dyadic levels, the grid (n {}, strichartz.box_length {}) resolves {:?}",
                EstimateScanReport::MIN_SEPARATIONS,
                cfg.n,
                cfg.strichartz_box_length,
                levels
            ),
        }
        .into());
    }
    let scan = StrichartzScan {
        grid: g,
        levels,
        q: cfg.strichartz_q,
        r: cfg.strichartz_r,
        window: TimeWindow::new(cfg.strichartz_window, cfg.scan_time_samples)?,
        seeds: cfg.scan_seeds,
        base_seed: cfg.seed,
        d_av: cfg.d_av,
        data_width: cfg.strichartz_data_width,
    };
    let rep = strichartz_scan(&scan)?;
    let profile = strichartz_window_profile(&scan, &[1.0, 2.0, 4.0])?;
    write_scan(
        out,
        &rep,
        json!({
            "q": scan.q,
            "r": scan.r,
            "levels": scan.levels,
            "window": cfg.strichartz_window,
            "window_convergence": profile
                .iter()
                .map(|(t, m)| json!({"half_width": t, "mean_ratio_top_level": m}))
                .collect::<Vec<_>>(),
        }),
    )
}

struct PicardRun {
    amplitude: f64,
    report: dmnls_core::PicardReport,
    stepper_gap: Option<f64>,
}

pub fn picard(cfg: &RunConfig, out: &RunDir) -> anyhow::Result<serde_json::Value> {
    cfg.require_nonzero_average("picard")?;
    let g = grid(cfg)?;
    let mut params = evolution_params(cfg);
    params.eps = 0.0;
    params.snapshot_every = 1;
    let opts = PicardOptions {
        tol: cfg.picard_tol,
        max_iter: cfg.picard_max_iter,
        smallness: None,
    };
    let runs = amplitude_ladder(cfg)
        .par_iter()
        .map(|&a| -> anyhow::Result<PicardRun> {
            let u0 = initial_field(cfg, &g, some_amplitude(a))?;
            let (traj, report) = picard_solve(&u0, &params, &opts)?;
            let stepper_gap = if report.converged {
                solve_averaged(&u0, &params).ok().map(|st| {
                    traj.snapshots()
                        .iter()
                        .zip(st.snapshots())
                        .map(|(p, s)| l2(&p.sub(s)))
                        .fold(0.0, f64::max)
                })
            } else {
                None
            };
            Ok(PicardRun {
                amplitude: a,
                report,
                stepper_gap,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut summary_rows = Vec::new();
    for run in &runs {
        for (k, res) in run.report.residuals.iter().enumerate() {
            let ratio = (k > 0).then(|| run.report.contraction_ratios[k - 1]);
            rows.push(vec![
                num(run.amplitude),
                (k + 1).to_string(),
                num(*res),
                ratio.map(num).unwrap_or_default(),
            ]);
        }
        summary_rows.push(vec![
            num(run.amplitude),
            run.report.converged.to_string(),
            run.report.diverged.to_string(),
            run.report.iterations().to_string(),
            run.report.max_ratio().map(num).unwrap_or_default(),
            run.stepper_gap.map(num).unwrap_or_default(),
        ]);
    }
    out.write_csv(
        "picard.csv",
        &["amplitude", "iteration", "residual", "ratio"],
        &rows,
    )?;
    out.write_csv(
        "picard_summary.csv",
        &[
            "amplitude",
            "converged",
            "diverged",
            "iterations",
            "max_ratio",
            "stepper_gap",
        ],
        &summary_rows,
    )?;
    let mut sorted: Vec<&PicardRun> = runs.iter().collect();
    sorted.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    let first_failure = sorted
        .iter()
        .find(|r| !r.report.converged)
        .map(|r| r.amplitude);
    let last_success = sorted
        .iter()
        .take_while(|r| r.report.converged)
        .last()
        .map(|r| r.amplitude);
    Ok(json!({
        "amplitudes": runs.iter().map(|r| r.amplitude).collect::<Vec<_>>(),
        "converged": runs.iter().map(|r| r.report.converged).collect::<Vec<_>>(),
        "contraction_boundary": {
            "largest_converged": last_success,
            "smallest_failed": first_failure,
        },
    }))
}

pub struct VpTable {
    pub rows: Vec<(&'static str, f64)>,
}

pub fn vpnorm(traj: &Trajectory, p: f64, d_av: f64) -> anyhow::Result<VpTable> {
    if traj.len() < 2 {
        bail!("need at least two snapshots, found {}", traj.len());
    }
    let raw = |inf| -> anyhow::Result<f64> {
        Ok(p_variation(
            &VariationSample::from_fields(traj.times(), traj.snapshots(), inf)?,
            p,
        )?)
    };
    Ok(VpTable {
        rows: vec![
            ("p_variation", raw(false)?),
            ("p_variation_infinity", raw(true)?),
            ("vp_delta", vp_delta_norm(traj, p, d_av, false)?),
            ("vp_delta_infinity", vp_delta_norm(traj, p, d_av, true)?),
        ],
    })
}
