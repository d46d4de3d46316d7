//! Processor interconnection topologies and a frame-stream scheduling
//! simulator.

mod config;
mod generators;
mod simulator;

pub use config::{parse_config, run_sweep, write_sweep_csv, SweepConfig, SweepRow, MAX_RETRIES};
pub use generators::generate_topology;
pub use simulator::{simulate_stream, simulate_stream_from, speedup, Arrival, SimResult, Workload};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyModel {
    /// Each unordered pair linked with probability `p`.
    Random { p: f64 },
    /// Ring lattice of even degree `k`, each edge rewired with probability `p_rew`.
    SmallWorld { k: usize, p_rew: f64 },
    /// Preferential attachment, `m` links per new node.
    ScaleFree { m: usize },
    /// 4-neighbor grid.
    Lattice { rows: usize, cols: usize },
}

impl TopologyModel {
    pub fn name(&self) -> &'static str {
        match self {
            TopologyModel::Random { .. } => "random",
            TopologyModel::SmallWorld { .. } => "small_world",
            TopologyModel::ScaleFree { .. } => "scale_free",
            TopologyModel::Lattice { .. } => "lattice",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologySpec {
    pub model: TopologyModel,
    pub n: usize,
    pub seed: u64,
}

impl TopologySpec {
    pub fn new(model: TopologyModel, n: usize, seed: u64) -> Self {
        TopologySpec { model, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let n = self.n;
        match self.model {
            TopologyModel::Random { p } if !unit(p) => bad(format!("p = {p} outside [0, 1]")),
            TopologyModel::SmallWorld { p_rew, .. } if !unit(p_rew) => {
                bad(format!("p_rew = {p_rew} outside [0, 1]"))
            }
            TopologyModel::SmallWorld { k, .. } if k % 2 != 0 || k < 2 || k >= n => {
                bad(format!("k = {k} must be even with 2 <= k < N = {n}"))
            }
            TopologyModel::ScaleFree { m } if m < 1 || m >= n => {
                bad(format!("m = {m} must satisfy 1 <= m < N = {n}"))
            }
            TopologyModel::Lattice { rows, cols } if rows * cols != n || n == 0 => bad(format!(
                "rows x cols = {rows} x {cols} does not equal N = {n}"
            )),
            _ if n == 0 => bad("N must be at least 1".into()),
            _ => Ok(()),
        }
    }
}

/// `(rows, cols)` with `rows <= cols`, `rows * cols == n` and `rows` as
/// large as possible; `(0, 0)` for `n == 0`.
pub fn near_square(n: usize) -> (usize, usize) {
    let rows = (1..=n)
        .take_while(|r| r * r <= n)
        .filter(|r| n.is_multiple_of(*r))
        .last()
        .unwrap_or(0);
    (rows, n.checked_div(rows).unwrap_or(0))
}

/// Mean shortest-path hop count over ordered pairs of distinct nodes; 0 for
/// a single node.
pub fn avg_path_len(g: &SpatialGraph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::NoProcessors);
    }
    if n == 1 {
        return Ok(0.0);
    }
    let mut total = 0usize;
    for u in 0..n {
        for d in g.shortest_path_lengths(NodeId(u))? {
            total += d.ok_or(Error::Disconnected)?;
        }
    }
    Ok(total as f64 / (n * (n - 1)) as f64)
}
