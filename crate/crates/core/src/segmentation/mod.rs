//! Community detection on image networks. Each detected community is read
//! back as one segmented image region.

mod greedy;
mod label_propagation;
mod labels;

use std::collections::{BTreeMap, BTreeSet};

pub use labels::{partition_to_label_image, LabelImage};

use crate::builders::{build_pixel_similarity_network, SimilarityParams};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};
use crate::image::GrayImage;

/// Community label per node, dense from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Accepts labels that are already dense (`{0..K-1}` all used).
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; k];
        for &l in &labels {
            used[l] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::InvalidPartition("labels are not dense".into()));
        }
        Ok(Partition(labels))
    }

    /// Renumbers arbitrary labels densely in order of first appearance.
    pub fn from_raw(raw: &[usize]) -> Self {
        let mut map = BTreeMap::new();
        let labels = raw
            .iter()
            .map(|&r| {
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect();
        Partition(labels)
    }

    pub fn singletons(n: usize) -> Self {
        Partition((0..n).collect())
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn label(&self, u: NodeId) -> usize {
        self.0[u.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.0.iter().max().map_or(0, |m| m + 1)
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.community_count()];
        for &l in &self.0 {
            sizes[l] += 1;
        }
        sizes
    }
}

fn check_partition(g: &SpatialGraph, p: &Partition) -> Result<()> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if p.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            expected: g.node_count(),
            actual: p.len(),
        });
    }
    Ok(())
}

/// Weighted modularity `Q = sum_c (e_cc - a_c^2)`.
///
/// `e_cc` is the fraction of total adjacency weight inside `c` and `a_c` the
/// fraction of weighted edge endpoints in `c`. Both sums walk the adjacency in
/// the same order, so a single community gives exactly 0.
pub fn modularity(g: &SpatialGraph, p: &Partition) -> Result<f64> {
    check_partition(g, p)?;
    let k = p.community_count();
    let mut inside = vec![0.0; k];
    let mut ends = vec![0.0; k];
    let mut total = 0.0;
    for u in 0..g.node_count() {
        let cu = p.0[u];
        for (v, w) in g.neighbors(NodeId(u))? {
            total += w;
            ends[cu] += w;
            if p.0[v.index()] == cu {
                inside[cu] += w;
            }
        }
    }
    if !(total > 0.0) {
        return Err(Error::EmptyGraph);
    }
    Ok(inside
        .iter()
        .zip(&ends)
        .map(|(e, a)| e / total - (a / total) * (a / total))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommunityMethod {
    #[default]
    GreedyModularity,
    LabelPropagation,
}

/// Label propagation stops after this many full passes.
pub const MAX_PROPAGATION_PASSES: usize = 100;

/// Detects communities; deterministic for a given `(method, seed)`.
///
/// `GreedyModularity` ignores the seed.
pub fn detect_communities(
    g: &SpatialGraph,
    method: CommunityMethod,
    seed: u64,
) -> Result<Partition> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if g.node_count() == 0 {
        return Err(Error::InvalidParameter("graph has no nodes".into()));
    }
    let raw = match method {
        CommunityMethod::GreedyModularity => greedy::agglomerate(g),
        CommunityMethod::LabelPropagation => label_propagation::propagate(g, seed),
    };
    Ok(Partition::from_raw(&raw))
}

/// Repeatedly folds the smallest community below `min_size` into the
/// neighboring community it shares the most edge weight with (ties to the
/// smaller label). Communities without neighbors are left alone.
pub fn merge_small_communities(
    g: &SpatialGraph,
    p: &Partition,
    min_size: usize,
) -> Result<Partition> {
    check_partition(g, p)?;
    let k = p.community_count();
    let mut size = p.community_sizes();
    let mut conn: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
    for (u, v, w) in g.edges() {
        let (cu, cv) = (p.0[u.index()], p.0[v.index()]);
        if cu != cv {
            *conn[cu].entry(cv).or_insert(0.0) += w;
            *conn[cv].entry(cu).or_insert(0.0) += w;
        }
    }
    let mut parent: Vec<usize> = (0..k).collect();
    let mut pending: BTreeSet<(usize, usize)> = (0..k)
        .filter(|&c| size[c] < min_size)
        .map(|c| (size[c], c))
        .collect();

    while let Some((_, c)) = pending.pop_first() {
        let Some(target) = conn[c]
            .iter()
            .fold(None, |best: Option<(usize, f64)>, (&t, &w)| match best {
                Some((_, bw)) if bw >= w => best,
                _ => Some((t, w)),
            })
            .map(|(t, _)| t)
        else {
            continue;
        };
        let links = std::mem::take(&mut conn[c]);
        for (other, w) in links {
            conn[other].remove(&c);
            if other != target {
                *conn[other].entry(target).or_insert(0.0) += w;
                *conn[target].entry(other).or_insert(0.0) += w;
            }
        }
        pending.remove(&(size[target], target));
        size[target] += size[c];
        size[c] = 0;
        parent[c] = target;
        if size[target] < min_size {
            pending.insert((size[target], target));
        }
    }

    let root = |mut c: usize| {
        while parent[c] != c {
            c = parent[c];
        }
        c
    };
    let raw: Vec<usize> = p.0.iter().map(|&c| root(c)).collect();
    Ok(Partition::from_raw(&raw))
}

/// Fraction of node pairs on which two labelings agree (same/different).
pub fn rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len() as f64;
    if a.len() < 2 {
        return Ok(1.0);
    }
    let pairs = |c: f64| c * (c - 1.0) / 2.0;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut ra: BTreeMap<usize, f64> = BTreeMap::new();
    let mut rb: BTreeMap<usize, f64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *ra.entry(x).or_default() += 1.0;
        *rb.entry(y).or_default() += 1.0;
    }
    let both: f64 = joint.values().map(|&c| pairs(c)).sum();
    let in_a: f64 = ra.values().map(|&c| pairs(c)).sum();
    let in_b: f64 = rb.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    Ok((total + 2.0 * both - in_a - in_b) / total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentParams {
    pub similarity: SimilarityParams,
    pub method: CommunityMethod,
    pub seed: u64,
    /// Merge communities smaller than this (disabled when `None`).
    pub min_size: Option<usize>,
}

impl Default for SegmentParams {
    fn default() -> Self {
        SegmentParams {
            similarity: SimilarityParams::default(),
            method: CommunityMethod::GreedyModularity,
            seed: 42,
            min_size: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub network: SpatialGraph,
    pub partition: Partition,
    pub labels: LabelImage,
}

/// Similarity network, community detection and label image in one call.
pub fn segment_image(img: &GrayImage, params: &SegmentParams) -> Result<Segmentation> {
    let network = build_pixel_similarity_network(img, &params.similarity)?;
    let mut partition = detect_communities(&network, params.method, params.seed)?;
    if let Some(min) = params.min_size {
        partition = merge_small_communities(&network, &partition, min)?;
    }
    let labels = partition_to_label_image(&partition, &network, img.width(), img.height())?;
    Ok(Segmentation {
        network,
        partition,
        labels,
    })
}
