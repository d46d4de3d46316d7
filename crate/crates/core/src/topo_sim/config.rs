use std::io::Write;

use rayon::prelude::*;

use super::{
    avg_path_len, generate_topology, near_square, simulate_stream_from, Arrival, TopologyModel,
    TopologySpec, Workload,
};
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Attempts per run when regenerating disconnected topologies.
pub const MAX_RETRIES: u64 = 100;

/// A parameter sweep: every model in `models` crossed with every size in
/// `sizes`, `runs` seeds each (`seed`, `seed + 1`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub models: Vec<String>,
    pub sizes: Vec<usize>,
    pub p: f64,
    pub k: usize,
    pub p_rew: f64,
    pub m: usize,
    /// Lattice shape; when unset the most nearly square factorization of N.
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub seed: u64,
    pub runs: u64,
    pub workload: Workload,
    pub master: Option<usize>,
    /// Regenerate disconnected topologies with the next seed.
    pub retry: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            models: vec!["random".into()],
            sizes: vec![16],
            p: 0.1,
            k: 4,
            p_rew: 0.1,
            m: 2,
            rows: None,
            cols: None,
            seed: 42,
            runs: 1,
            workload: Workload::compute_only(100, 1.0),
            master: None,
            retry: false,
        }
    }
}

impl SweepConfig {
    pub fn model_for(&self, name: &str, n: usize) -> Result<TopologyModel> {
        Ok(match name {
            "random" => TopologyModel::Random { p: self.p },
            "small_world" => TopologyModel::SmallWorld {
                k: self.k,
                p_rew: self.p_rew,
            },
            "scale_free" => TopologyModel::ScaleFree { m: self.m },
            "lattice" => {
                let (rows, cols) = match (self.rows, self.cols) {
                    (Some(r), Some(c)) => (r, c),
                    (Some(r), None) if r > 0 => (r, n / r),
                    (None, Some(c)) if c > 0 => (n / c, c),
                    _ => near_square(n),
                };
                TopologyModel::Lattice { rows, cols }
            }
            other => return Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        })
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: invalid value {value:?} for {key}")))
}

/// Parses flat `key = value` lines; `#` starts a comment. `model` and `N`
/// accept comma-separated lists.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let mut arrival = "batch".to_string();
    let mut interval = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {line_no}: expected key = value")))?;
        let (key, value) = (key.trim(), value.trim());
        let w = &mut cfg.workload;
        match key {
            "model" => cfg.models = value.split(',').map(|s| s.trim().to_string()).collect(),
            "N" => {
                cfg.sizes = value
                    .split(',')
                    .map(|s| parse_value(key, s.trim(), line_no))
                    .collect::<Result<_>>()?
            }
            "p" => cfg.p = parse_value(key, value, line_no)?,
            "k" => cfg.k = parse_value(key, value, line_no)?,
            "p_rew" => cfg.p_rew = parse_value(key, value, line_no)?,
            "m" => cfg.m = parse_value(key, value, line_no)?,
            "rows" => cfg.rows = Some(parse_value(key, value, line_no)?),
            "cols" => cfg.cols = Some(parse_value(key, value, line_no)?),
            "seed" => cfg.seed = parse_value(key, value, line_no)?,
            "runs" => cfg.runs = parse_value(key, value, line_no)?,
            "master" => cfg.master = Some(parse_value(key, value, line_no)?),
            "retry" => cfg.retry = parse_value(key, value, line_no)?,
            "frames" => w.frames = parse_value(key, value, line_no)?,
            "t_proc" => w.t_proc = parse_value(key, value, line_no)?,
            "t_hop" => w.t_hop = parse_value(key, value, line_no)?,
            "frame_bits" => w.frame_bits = parse_value(key, value, line_no)?,
            "bandwidth" => w.bandwidth = parse_value(key, value, line_no)?,
            "arrival" => arrival = value.to_string(),
            "interval" => interval = Some(parse_value::<f64>(key, value, line_no)?),
            other => {
                return Err(Error::Parse(format!(
                    "line {line_no}: unknown key {other:?}"
                )))
            }
        }
    }
    cfg.workload.arrival = match (arrival.as_str(), interval) {
        ("batch", _) => Arrival::Batch,
        ("interval", Some(dt)) => Arrival::Interval(dt),
        ("interval", None) => {
            return Err(Error::Parse("arrival = interval needs an interval".into()))
        }
        (other, _) => return Err(Error::Parse(format!("unknown arrival {other:?}"))),
    };
    if cfg.models.is_empty() || cfg.sizes.is_empty() || cfg.runs == 0 {
        return Err(Error::Parse(
            "sweep needs at least one model, size and run".into(),
        ));
    }
    for name in &cfg.models {
        cfg.model_for(name, cfg.sizes[0])?;
    }
    cfg.workload.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub n: usize,
    /// Seed actually used, after any retries.
    pub seed: u64,
    pub makespan: f64,
    pub speedup: f64,
    pub avg_path_len: f64,
}

fn run_one(cfg: &SweepConfig, name: &str, n: usize, seed: u64) -> Result<SweepRow> {
    let model = cfg.model_for(name, n)?;
    let attempts = if cfg.retry { MAX_RETRIES } else { 1 };
    let mut last = Error::Disconnected;
    for attempt in 0..attempts {
        let seed = seed + attempt;
        let g = generate_topology(&TopologySpec::new(model, n, seed))?;
        match simulate_stream_from(&g, &cfg.workload, seed, cfg.master.map(NodeId)) {
            Ok(r) => {
                return Ok(SweepRow {
                    model: name.to_string(),
                    n,
                    seed,
                    makespan: r.makespan,
                    speedup: r.speedup,
                    avg_path_len: avg_path_len(&g)?,
                })
            }
            Err(Error::Disconnected) => last = Error::Disconnected,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Runs every (model, N, seed) combination; rows come back in that nesting
/// order regardless of how the work was scheduled.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for name in &cfg.models {
        for &n in &cfg.sizes {
            for r in 0..cfg.runs {
                jobs.push((name.as_str(), n, cfg.seed + r));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(name, n, seed)| run_one(cfg, name, n, seed))
        .collect()
}

/// CSV `model,N,seed,makespan,speedup,avg_path_len`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "model,N,seed,makespan,speedup,avg_path_len")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.model, r.n, r.seed, r.makespan, r.speedup, r.avg_path_len
        )?;
    }
    Ok(())
}
