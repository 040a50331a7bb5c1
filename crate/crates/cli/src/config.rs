//! Flat `key = value` run configuration.
//!
//! `#` starts a comment. Lists are comma separated. Reals accept a trailing `pi`
//! (`80pi`, `0.5 pi`, `pi`). Defaults depend on `dimension`, which is resolved first.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dmnls_core::{DealiasPolicy, DispersionMap};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Gaussian { width: f64, amplitude: f64 },
    Mode { k: [i64; 2], amplitude: f64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: usize,
    pub n: usize,
    pub box_length: f64,
    pub d_av: f64,
    pub sigma: f64,
    pub eps: f64,
    pub dispersion: DispersionMap,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_every: usize,
    pub quad_nodes: usize,
    pub dealias: DealiasPolicy,
    pub initial: Initial,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Amplitude ladder for `scatter` and `picard`.
    pub amplitudes: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    /// Original-equation steps per `eps` in `average-check`.
    pub average_substeps: usize,
    /// Time at which `scatter` reads the decay residual; `None` means `t_final / 2`.
    pub scatter_probe_time: Option<f64>,
    /// Time at which the amplitude sweep reads the residual.
    pub scatter_sweep_time: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub scan_separations: Vec<u32>,
    pub scan_seeds: u64,
    pub scan_time_samples: usize,
    pub scan_low_level: u32,
    pub scan_box_length: f64,
    pub scan_envelope_n: usize,
    pub scan_envelope_width: f64,
    pub scan_envelope_band: f64,
    pub strichartz_q: f64,
    pub strichartz_r: f64,
    pub strichartz_box_length: f64,
    /// Empty selects every ladder level of the grid (`n`, `strichartz.box_length`).
    pub strichartz_levels: Vec<u32>,
    pub strichartz_window: f64,
    pub strichartz_data_width: f64,
    pub vp_p: f64,
}

const KEYS: &[&str] = &[
    "dimension",
    "n",
    "box_length",
    "d_av",
    "sigma",
    "eps",
    "dispersion",
    "dt",
    "t_final",
    "snapshot_every",
    "quad_nodes",
    "dealias",
    "initial",
    "initial.width",
    "initial.amplitude",
    "initial.k",
    "initial.path",
    "seed",
    "output_dir",
    "amplitudes",
    "eps_ladder",
    "average.substeps",
    "scatter.probe_time",
    "scatter.sweep_time",
    "picard.tol",
    "picard.max_iter",
    "scan.separations",
    "scan.seeds",
    "scan.time_samples",
    "scan.low_level",
    "scan.box_length",
    "scan.envelope_n",
    "scan.envelope_width",
    "scan.envelope_band",
    "strichartz.q",
    "strichartz.r",
    "strichartz.box_length",
    "strichartz.levels",
    "strichartz.window",
    "strichartz.data_width",
    "vp.p",
];

impl RunConfig {
    /// Desk-scale defaults for `dimension` 1 or 2.
    pub fn defaults(dimension: usize) -> Self {
        let two = dimension == 2;
        Self {
            dimension,
            n: if two { 256 } else { 1024 },
            box_length: if two { 40.0 * PI } else { 80.0 * PI },
            d_av: 1.0,
            sigma: 2.0 / dimension as f64,
            eps: 0.0,
            dispersion: DispersionMap::Square,
            dt: 1e-3,
            t_final: 1.0,
            snapshot_every: 100,
            quad_nodes: 32,
            dealias: DealiasPolicy::Pad,
            initial: Initial::Gaussian {
                width: 1.0,
                amplitude: 0.1,
            },
            seed: 0,
            output_dir: PathBuf::from("run"),
            amplitudes: Vec::new(),
            eps_ladder: Vec::new(),
            average_substeps: 96,
            scatter_probe_time: None,
            scatter_sweep_time: 0.0,
            picard_tol: 1e-12,
            picard_max_iter: 50,
            scan_separations: (4..=9).collect(),
            scan_seeds: 32,
            scan_time_samples: 128,
            scan_low_level: 1,
            scan_box_length: 64.0,
            scan_envelope_n: if two { 64 } else { 256 },
            scan_envelope_width: 4.0,
            scan_envelope_band: 0.5,
            strichartz_q: if two { 4.0 } else { 6.0 },
            strichartz_r: if two { 4.0 } else { 6.0 },
            strichartz_levels: Vec::new(),
            strichartz_box_length: if two { 32.0 } else { 64.0 },
            strichartz_window: 1.0,
            strichartz_data_width: 4.0,
            vp_p: 2.0,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::from_pairs(parse_pairs(text)?)
    }

    /// Applies `(key, value)` pairs in order; later pairs override earlier ones.
    pub fn from_pairs(pairs: Vec<(String, String)>) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k));
            }
            map.insert(k, v);
        }
        let dimension = match map.get("dimension") {
            Some(v) => parse_usize("dimension", v)?,
            None => 1,
        };
        if !(dimension == 1 || dimension == 2) {
            return Err(invalid("dimension", "must be 1 or 2"));
        }
        let mut c = Self::defaults(dimension);
        let mut init_kind = None;
        let (mut width, mut amplitude, mut k, mut path) = (1.0, 0.1, [0i64; 2], None);
        for (key, v) in &map {
            let key = key.as_str();
            match key {
                "dimension" => {}
                "n" => c.n = parse_usize(key, v)?,
                "box_length" => c.box_length = parse_real(key, v)?,
                "d_av" => c.d_av = parse_real(key, v)?,
                "sigma" => c.sigma = parse_real(key, v)?,
                "eps" => c.eps = parse_real(key, v)?,
                "dispersion" => c.dispersion = v.parse().map_err(|e: String| invalid(key, e))?,
                "dt" => c.dt = parse_real(key, v)?,
                "t_final" => c.t_final = parse_real(key, v)?,
                "snapshot_every" => c.snapshot_every = parse_usize(key, v)?,
                "quad_nodes" => c.quad_nodes = parse_usize(key, v)?,
                "dealias" => c.dealias = v.parse().map_err(|e: String| invalid(key, e))?,
                "initial" => init_kind = Some(v.clone()),
                "initial.width" => width = parse_real(key, v)?,
                "initial.amplitude" => amplitude = parse_real(key, v)?,
                "initial.k" => k = parse_wavenumber(key, v)?,
                "initial.path" => path = Some(PathBuf::from(v)),
                "seed" => c.seed = v.parse().map_err(|_| invalid(key, "expected u64"))?,
                "output_dir" => c.output_dir = PathBuf::from(v),
                "amplitudes" => c.amplitudes = parse_list(key, v, parse_real)?,
                "eps_ladder" => c.eps_ladder = parse_list(key, v, parse_real)?,
                "average.substeps" => c.average_substeps = parse_usize(key, v)?,
                "scatter.probe_time" => {
                    c.scatter_probe_time = if v.is_empty() {
                        None
                    } else {
                        Some(parse_real(key, v)?)
                    }
                }
                "scatter.sweep_time" => c.scatter_sweep_time = parse_real(key, v)?,
                "picard.tol" => c.picard_tol = parse_real(key, v)?,
                "picard.max_iter" => c.picard_max_iter = parse_usize(key, v)?,
                "scan.separations" => c.scan_separations = parse_list(key, v, parse_u32)?,
                "scan.seeds" => c.scan_seeds = parse_usize(key, v)? as u64,
                "scan.time_samples" => c.scan_time_samples = parse_usize(key, v)?,
                "scan.low_level" => c.scan_low_level = parse_u32(key, v)?,
                "scan.box_length" => c.scan_box_length = parse_real(key, v)?,
                "scan.envelope_n" => c.scan_envelope_n = parse_usize(key, v)?,
                "scan.envelope_width" => c.scan_envelope_width = parse_real(key, v)?,
                "scan.envelope_band" => c.scan_envelope_band = parse_real(key, v)?,
                "strichartz.q" => c.strichartz_q = parse_real(key, v)?,
                "strichartz.r" => c.strichartz_r = parse_real(key, v)?,
                "strichartz.levels" => c.strichartz_levels = parse_list(key, v, parse_u32)?,
                "strichartz.box_length" => c.strichartz_box_length = parse_real(key, v)?,
                "strichartz.window" => c.strichartz_window = parse_real(key, v)?,
                "strichartz.data_width" => c.strichartz_data_width = parse_real(key, v)?,
                "vp.p" => c.vp_p = parse_real(key, v)?,
                _ => unreachable!("checked against KEYS"),
            }
        }
        c.initial = match init_kind.as_deref().unwrap_or("gaussian") {
            "gaussian" => Initial::Gaussian { width, amplitude },
            "mode" => Initial::Mode { k, amplitude },
            "file" => Initial::File {
                path: path.ok_or_else(|| invalid("initial.path", "required for file data"))?,
            },
            other => {
                return Err(invalid(
                    "initial",
                    format!("unknown kind `{other}` (gaussian|mode|file)"),
                ))
            }
        };
        c.validate()?;
        Ok(c)
    }

    /// Structural checks shared by every scenario.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(
                    key,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(invalid(
                "n",
                format!("must be a power of two >= 16, got {}", self.n),
            ));
        }
        positive("box_length", self.box_length)?;
        if !self.d_av.is_finite() {
            return Err(invalid("d_av", "must be finite"));
        }
        positive("sigma", self.sigma)?;
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(invalid("eps", "must be nonnegative"));
        }
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        if self.snapshot_every == 0 {
            return Err(invalid("snapshot_every", "must be at least 1"));
        }
        if self.quad_nodes == 0 {
            return Err(invalid("quad_nodes", "must be at least 1"));
        }
        match &self.initial {
            Initial::Gaussian { width, amplitude } => {
                positive("initial.width", *width)?;
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude", "must be finite"));
                }
            }
            Initial::Mode { k, amplitude } => {
                if self.dimension == 1 && k[1] != 0 {
                    return Err(invalid("initial.k", "one component in dimension 1"));
                }
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude", "must be finite"));
                }
            }
            Initial::File { .. } => {}
        }
        if self.amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(invalid("amplitudes", "entries must be nonnegative"));
        }
        if self.eps_ladder.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(invalid("eps_ladder", "entries must be positive"));
        }
        if self.average_substeps == 0 {
            return Err(invalid("average.substeps", "must be at least 1"));
        }
        if !(self.picard_tol.is_finite() && self.picard_tol >= 0.0) {
            return Err(invalid("picard.tol", "must be nonnegative"));
        }
        if self.picard_max_iter == 0 {
            return Err(invalid("picard.max_iter", "must be at least 1"));
        }
        positive("scan.box_length", self.scan_box_length)?;
        positive("scan.envelope_width", self.scan_envelope_width)?;
        positive("scan.envelope_band", self.scan_envelope_band)?;
        positive("strichartz.box_length", self.strichartz_box_length)?;
        positive("strichartz.window", self.strichartz_window)?;
        positive("strichartz.data_width", self.strichartz_data_width)?;
        if self.vp_p.is_nan() || self.vp_p < 1.0 {
            return Err(invalid("vp.p", "must be at least 1"));
        }
        Ok(())
    }

    /// Scattering and the contraction estimate assume nonzero average dispersion.
    pub fn require_nonzero_average(&self, scenario: &str) -> Result<(), ConfigError> {
        if self.d_av == 0.0 {
            return Err(invalid(
                "d_av",
                format!(
                    "{scenario} needs d_av != 0: small-data scattering and the \
                     contraction estimate assume nonzero average dispersion"
                ),
            ));
        }
        Ok(())
    }

    /// Every key in canonical order; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| join(v.iter().map(|x| x.to_string()));
        let ulist = |v: &[u32]| join(v.iter().map(|x| x.to_string()));
        let (kind, width, amplitude, k, path) = match &self.initial {
            Initial::Gaussian { width, amplitude } => {
                ("gaussian", *width, *amplitude, [0, 0], None)
            }
            Initial::Mode { k, amplitude } => ("mode", 1.0, *amplitude, *k, None),
            Initial::File { path } => ("file", 1.0, 0.1, [0, 0], Some(path.clone())),
        };
        let k_text = if self.dimension == 1 {
            k[0].to_string()
        } else {
            format!("{},{}", k[0], k[1])
        };
        vec![
            ("dimension", self.dimension.to_string()),
            ("n", self.n.to_string()),
            ("box_length", self.box_length.to_string()),
            ("d_av", self.d_av.to_string()),
            ("sigma", self.sigma.to_string()),
            ("eps", self.eps.to_string()),
            ("dispersion", self.dispersion.as_str().to_string()),
            ("dt", self.dt.to_string()),
            ("t_final", self.t_final.to_string()),
            ("snapshot_every", self.snapshot_every.to_string()),
            ("quad_nodes", self.quad_nodes.to_string()),
            ("dealias", self.dealias.as_str().to_string()),
            ("initial", kind.to_string()),
            ("initial.width", width.to_string()),
            ("initial.amplitude", amplitude.to_string()),
            ("initial.k", k_text),
            (
                "initial.path",
                path.map(|p| p.display().to_string()).unwrap_or_default(),
            ),
            ("seed", self.seed.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("amplitudes", list(&self.amplitudes)),
            ("eps_ladder", list(&self.eps_ladder)),
            ("average.substeps", self.average_substeps.to_string()),
            (
                "scatter.probe_time",
                self.scatter_probe_time
                    .map(|t| t.to_string())
                    .unwrap_or_default(),
            ),
            ("scatter.sweep_time", self.scatter_sweep_time.to_string()),
            ("picard.tol", self.picard_tol.to_string()),
            ("picard.max_iter", self.picard_max_iter.to_string()),
            ("scan.separations", ulist(&self.scan_separations)),
            ("scan.seeds", self.scan_seeds.to_string()),
            ("scan.time_samples", self.scan_time_samples.to_string()),
            ("scan.low_level", self.scan_low_level.to_string()),
            ("scan.box_length", self.scan_box_length.to_string()),
            ("scan.envelope_n", self.scan_envelope_n.to_string()),
            ("scan.envelope_width", self.scan_envelope_width.to_string()),
            ("scan.envelope_band", self.scan_envelope_band.to_string()),
            ("strichartz.q", self.strichartz_q.to_string()),
            ("strichartz.r", self.strichartz_r.to_string()),
            ("strichartz.levels", ulist(&self.strichartz_levels)),
            (
                "strichartz.box_length",
                self.strichartz_box_length.to_string(),
            ),
            ("strichartz.window", self.strichartz_window.to_string()),
            (
                "strichartz.data_width",
                self.strichartz_data_width.to_string(),
            ),
            ("vp.p", self.vp_p.to_string()),
        ]
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(",")
}

/// Splits text into `(key, value)` pairs; rejects duplicate keys.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(ConfigError::Duplicate(k));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// `key=value` from the command line.
pub fn parse_override(text: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = text.split_once('=').ok_or_else(|| ConfigError::Syntax {
        line: 0,
        text: text.to_string(),
    })?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_real(key: &str, v: &str) -> Result<f64, ConfigError> {
    let t = v.trim();
    let parsed = match t.strip_suffix("pi") {
        Some(head) => {
            let head = head.trim().trim_end_matches('*').trim();
            if head.is_empty() {
                Ok(PI)
            } else {
                head.parse::<f64>().map(|x| x * PI)
            }
        }
        None => t.parse::<f64>(),
    };
    parsed.map_err(|_| invalid(key, format!("expected a real number, got `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| invalid(key, format!("expected a nonnegative integer, got `{v}`")))
}

fn parse_u32(key: &str, v: &str) -> Result<u32, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| invalid(key, format!("expected a nonnegative integer, got `{v}`")))
}

fn parse_list<T>(
    key: &str,
    v: &str,
    item: fn(&str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| item(key, s)).collect()
}

fn parse_wavenumber(key: &str, v: &str) -> Result<[i64; 2], ConfigError> {
    let parts: Vec<i64> = v
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| invalid(key, format!("expected integers, got `{v}`")))
        })
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a] => Ok([*a, 0]),
        [a, b] => Ok([*a, *b]),
        _ => Err(invalid(key, "expected one or two integers")),
    }
}
