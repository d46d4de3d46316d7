use std::collections::BTreeSet;

use super::{TopologyModel, TopologySpec};
use crate::error::Result;
use crate::graph::{NodeId, Point2, SpatialGraph};
use crate::rng::SplitMix64;

/// Builds the topology described by `spec`. Undirected, unit weights, and a
/// pure function of the spec (seed included).
pub fn generate_topology(spec: &TopologySpec) -> Result<SpatialGraph> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = SplitMix64::new(spec.seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let link = |adj: &mut Vec<BTreeSet<usize>>, u: usize, v: usize| {
        adj[u].insert(v);
        adj[v].insert(u);
    };

    match spec.model {
        TopologyModel::Random { p } => {
            for u in 0..n {
                for v in u + 1..n {
                    if rng.next_f64() < p {
                        link(&mut adj, u, v);
                    }
                }
            }
        }
        TopologyModel::SmallWorld { k, p_rew } => {
            for u in 0..n {
                for j in 1..=k / 2 {
                    link(&mut adj, u, (u + j) % n);
                }
            }
            // Rewire ring edges offset by offset, node by node.
            for j in 1..=k / 2 {
                for u in 0..n {
                    let v = (u + j) % n;
                    if rng.next_f64() >= p_rew || !adj[u].contains(&v) {
                        continue;
                    }
                    if adj[u].len() >= n - 1 {
                        continue;
                    }
                    let w = loop {
                        let w = rng.below(n as u64) as usize;
                        if w != u && !adj[u].contains(&w) {
                            break w;
                        }
                    };
                    adj[u].remove(&v);
                    adj[v].remove(&u);
                    link(&mut adj, u, w);
                }
            }
        }
        TopologyModel::ScaleFree { m } => {
            // Seed: complete graph on the first m + 1 nodes.
            let mut endpoints = Vec::new();
            for u in 0..=m {
                for v in u + 1..=m {
                    link(&mut adj, u, v);
                    endpoints.extend([u, v]);
                }
            }
            for v in m + 1..n {
                let mut targets = BTreeSet::new();
                while targets.len() < m {
                    targets.insert(endpoints[rng.below(endpoints.len() as u64) as usize]);
                }
                for t in targets {
                    link(&mut adj, v, t);
                    endpoints.extend([v, t]);
                }
            }
        }
        TopologyModel::Lattice { rows, cols } => {
            for r in 0..rows {
                for c in 0..cols {
                    let u = r * cols + c;
                    if c + 1 < cols {
                        link(&mut adj, u, u + 1);
                    }
                    if r + 1 < rows {
                        link(&mut adj, u, u + cols);
                    }
                }
            }
        }
    }

    let mut g = SpatialGraph::new_undirected();
    for u in 0..n {
        let pos = match spec.model {
            TopologyModel::Lattice { cols, .. } => {
                Some(Point2::new((u % cols) as f64, (u / cols) as f64))
            }
            _ => None,
        };
        g.add_node(pos)?;
    }
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs.range(u + 1..) {
            g.add_edge(NodeId(u), NodeId(v), 1.0)?;
        }
    }
    Ok(g)
}
