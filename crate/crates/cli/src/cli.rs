//! Argument parsing and scenario dispatch.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_override, ConfigError, RunConfig};
use crate::manifest::{unix_now, RunManifest};
use crate::report::{num, read_trajectory, RunDir};
use crate::scenarios;

#[derive(Debug, Parser)]
#[command(name = "dmnls", version, about = "Dispersion-managed NLS experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run directory; overrides `output_dir`.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Base seed; overrides `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Extra `key=value` setting applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evolve the averaged (eps = 0) or original (eps > 0) equation.
    Simulate,
    /// Residuals of the pulled-back solution against its final state.
    Scatter,
    /// Distance between original and averaged solutions along an eps ladder.
    AverageCheck,
    /// Bilinear interaction ratio against frequency separation.
    BilinearScan,
    /// Localized Strichartz ratio against frequency.
    StrichartzScan,
    /// Picard iteration of the averaged Duhamel map.
    Picard,
    /// p-variation of a stored trajectory.
    Vpnorm {
        /// Run directory or snapshot directory.
        path: PathBuf,
        #[arg(long)]
        p: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Scatter => "scatter",
            Command::AverageCheck => "average-check",
            Command::BilinearScan => "bilinear-scan",
            Command::StrichartzScan => "strichartz-scan",
            Command::Picard => "picard",
            Command::Vpnorm { .. } => "vpnorm",
        }
    }
}

/// 2 for configuration and usage errors, 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.chain()
        .any(|c| c.is::<ConfigError>() || c.is::<clap::Error>())
    {
        2
    } else {
        1
    }
}

pub fn resolve_config(global: &GlobalArgs) -> anyhow::Result<RunConfig> {
    let mut pairs = match &global.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            crate::config::parse_pairs(&text)?
        }
        None => Vec::new(),
    };
    for s in &global.set {
        pairs.push(parse_override(s)?);
    }
    if let Some(seed) = global.seed {
        pairs.push(("seed".into(), seed.to_string()));
    }
    if let Some(out) = &global.output {
        pairs.push(("output_dir".into(), out.display().to_string()));
    }
    let cfg = RunConfig::from_pairs(pairs)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args` (including the program name) and runs.
pub fn run_from_args<I, T>(args: I) -> anyhow::Result<PathBuf>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::try_parse_from(args)?)
}

/// Runs one scenario; returns the run directory.
pub fn run(cli: Cli) -> anyhow::Result<PathBuf> {
    let cfg = resolve_config(&cli.global)?;
    let threads = cli.global.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot start worker threads")?;
    pool.install(|| execute(&cli.command, &cfg))
}

fn execute(command: &Command, cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    let out = RunDir::create(&cfg.output_dir)?;
    let started = unix_now();
    let echo: BTreeMap<String, String> = cfg
        .to_pairs()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let mut manifest = RunManifest::new(command.name(), echo, started);
    let result = match command {
        Command::Simulate => scenarios::simulate(cfg, &out),
        Command::Scatter => scenarios::scatter(cfg, &out),
        Command::AverageCheck => scenarios::average_check(cfg, &out),
        Command::BilinearScan => scenarios::run_bilinear_scan(cfg, &out),
        Command::StrichartzScan => scenarios::run_strichartz_scan(cfg, &out),
        Command::Picard => scenarios::picard(cfg, &out),
        Command::Vpnorm { path, p } => vpnorm(cfg, &out, path, p.unwrap_or(cfg.vp_p)),
    };
    match result {
        Ok(summary) => {
            manifest.summary = summary;
            manifest.finish(out.root())?;
            Ok(out.root().to_path_buf())
        }
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(format!("{e:#}"));
            manifest.finish(out.root())?;
            Err(e)
        }
    }
}

fn vpnorm(
    cfg: &RunConfig,
    out: &RunDir,
    path: &std::path::Path,
    p: f64,
) -> anyhow::Result<serde_json::Value> {
    let traj = read_trajectory(path)?;
    let table = scenarios::vpnorm(&traj, p, cfg.d_av)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|(k, v)| vec![k.to_string(), num(*v)])
        .collect();
    for r in &rows {
        println!("{}\t{}", r[0], r[1]);
    }
    out.write_csv("vpnorm.csv", &["quantity", "value"], &rows)?;
    let mut summary = serde_json::Map::new();
    summary.insert("p".into(), p.into());
    summary.insert("snapshots".into(), traj.len().into());
    for (k, v) in &table.rows {
        summary.insert((*k).into(), (*v).into());
    }
    Ok(summary.into())
}
