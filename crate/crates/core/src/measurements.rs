//! Node- and graph-level network measurements.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};

/// Count of nodes per degree value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeHistogram(BTreeMap<usize, usize>);

impl DegreeHistogram {
    pub fn count(&self, degree: usize) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    /// `(degree, count)` pairs in increasing degree order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&d, &c)| (d, c))
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "degree,count")?;
        for (d, c) in self.iter() {
            writeln!(out, "{d},{c}")?;
        }
        Ok(())
    }
}

/// `[degree, strength, clustering, hierarchical degree 2, hierarchical degree 3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFeatureVector(pub [f64; 5]);

impl NodeFeatureVector {
    pub const ARITY: usize = 5;

    pub fn degree(&self) -> f64 {
        self.0[0]
    }

    pub fn strength(&self) -> f64 {
        self.0[1]
    }

    pub fn clustering(&self) -> f64 {
        self.0[2]
    }
}

fn require_undirected(g: &SpatialGraph) -> Result<()> {
    if g.is_directed() {
        Err(Error::DirectedGraph)
    } else {
        Ok(())
    }
}

/// Fraction of neighbor pairs of `u` that are adjacent; 0 when `u` has fewer
/// than two neighbors.
pub fn clustering_coefficient(g: &SpatialGraph, u: NodeId) -> Result<f64> {
    require_undirected(g)?;
    let neighbors: Vec<NodeId> = g
        .neighbors(u)?
        .map(|(v, _)| v)
        .filter(|&v| v != u)
        .collect();
    let k = neighbors.len();
    if k < 2 {
        return Ok(0.0);
    }
    let mut links = 0usize;
    for (i, &a) in neighbors.iter().enumerate() {
        for &b in &neighbors[i + 1..] {
            if g.has_edge(a, b) {
                links += 1;
            }
        }
    }
    Ok(links as f64 / (k * (k - 1) / 2) as f64)
}

/// Sizes of the BFS rings around `u` at distances `1..=max_level`.
fn ring_sizes(g: &SpatialGraph, u: NodeId, max_level: usize) -> Vec<usize> {
    let mut sizes = vec![0; max_level + 1];
    for d in g.bfs(u.index(), max_level).into_iter().flatten() {
        sizes[d] += 1;
    }
    sizes
}

/// Number of nodes at hop distance exactly `level` from `u`.
pub fn hierarchical_degree(g: &SpatialGraph, u: NodeId, level: usize) -> Result<usize> {
    g.check_node(u)?;
    if level == 0 {
        return Err(Error::InvalidParameter(
            "hierarchical level must be >= 1".into(),
        ));
    }
    Ok(ring_sizes(g, u, level)[level])
}

pub fn degree_distribution(g: &SpatialGraph) -> DegreeHistogram {
    let mut hist = BTreeMap::new();
    for u in 0..g.node_count() {
        let d = g.degree(NodeId(u)).expect("node in range");
        *hist.entry(d).or_insert(0) += 1;
    }
    DegreeHistogram(hist)
}

pub fn node_feature_vector(g: &SpatialGraph, u: NodeId) -> Result<NodeFeatureVector> {
    require_undirected(g)?;
    g.check_node(u)?;
    let rings = ring_sizes(g, u, 3);
    Ok(NodeFeatureVector([
        g.degree(u)? as f64,
        g.strength(u)?,
        clustering_coefficient(g, u)?,
        rings[2] as f64,
        rings[3] as f64,
    ]))
}

/// Feature vectors of every node, computed in parallel.
pub fn node_features(g: &SpatialGraph) -> Result<Vec<NodeFeatureVector>> {
    require_undirected(g)?;
    (0..g.node_count())
        .into_par_iter()
        .map(|u| node_feature_vector(g, NodeId(u)))
        .collect()
}

/// CSV with header `node,degree,strength,clustering,hdeg2,hdeg3`.
pub fn write_features_csv<W: Write>(features: &[NodeFeatureVector], mut out: W) -> Result<()> {
    writeln!(out, "node,degree,strength,clustering,hdeg2,hdeg3")?;
    for (u, NodeFeatureVector(f)) in features.iter().enumerate() {
        writeln!(out, "{},{},{},{},{},{}", u, f[0], f[1], f[2], f[3], f[4])?;
    }
    Ok(())
}
