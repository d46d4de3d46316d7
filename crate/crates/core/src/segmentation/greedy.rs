//! Greedy agglomerative modularity maximization.
//!
//! Starts from singletons and repeatedly merges the pair of communities with
//! the largest modularity gain `dQ = 2 (e_ij - a_i a_j)` until no merge has a
//! positive gain. Equal gains go to the lexicographically smallest
//! `(label_i, label_j)`; the merged community keeps the smaller label.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::graph::{NodeId, SpatialGraph};

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    i: usize,
    j: usize,
    version_i: u32,
    version_j: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Max-heap: larger gain first, then smaller (i, j).
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| (other.i, other.j).cmp(&(self.i, self.j)))
    }
}

/// Returns the community label of each node (labels are representative node
/// ids, not yet dense).
pub(super) fn agglomerate(g: &SpatialGraph) -> Vec<usize> {
    let n = g.node_count();
    let total: f64 = (0..n)
        .map(|u| g.strength(NodeId(u)).expect("node in range"))
        .sum();
    let mut community: Vec<usize> = (0..n).collect();
    if !(total > 0.0) {
        return community;
    }

    let mut share = vec![0.0; n];
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for u in 0..n {
        for (v, w) in g.neighbors(NodeId(u)).expect("node in range") {
            share[u] += w / total;
            if v.index() != u {
                *links[u].entry(v.index()).or_insert(0.0) += w / total;
            }
        }
    }
    let mut alive = vec![true; n];
    let mut version = vec![0u32; n];
    let gain = |links: &[BTreeMap<usize, f64>], share: &[f64], i: usize, j: usize| {
        2.0 * (links[i][&j] - share[i] * share[j])
    };

    let mut heap = BinaryHeap::new();
    for i in 0..n {
        for &j in links[i].keys().filter(|&&j| j > i) {
            heap.push(Candidate {
                gain: gain(&links, &share, i, j),
                i,
                j,
                version_i: 0,
                version_j: 0,
            });
        }
    }

    let mut members: Vec<Vec<usize>> = (0..n).map(|u| vec![u]).collect();
    while let Some(c) = heap.pop() {
        if !alive[c.i] || !alive[c.j] || version[c.i] != c.version_i || version[c.j] != c.version_j
        {
            continue;
        }
        if c.gain <= 0.0 {
            break;
        }
        let (keep, gone) = (c.i, c.j);
        let absorbed = std::mem::take(&mut links[gone]);
        for (k, e) in absorbed {
            links[k].remove(&gone);
            if k != keep {
                *links[keep].entry(k).or_insert(0.0) += e;
                *links[k].entry(keep).or_insert(0.0) += e;
            }
        }
        links[keep].remove(&gone);
        share[keep] += share[gone];
        alive[gone] = false;
        version[keep] += 1;
        let moved = std::mem::take(&mut members[gone]);
        members[keep].extend(moved);

        for &k in links[keep].keys() {
            let (i, j) = if keep < k { (keep, k) } else { (k, keep) };
            heap.push(Candidate {
                gain: gain(&links, &share, i, j),
                i,
                j,
                version_i: version[i],
                version_j: version[j],
            });
        }
    }

    for (label, nodes) in members.iter().enumerate() {
        for &u in nodes {
            community[u] = label;
        }
    }
    community
}
