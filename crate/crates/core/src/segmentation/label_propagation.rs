//! Asynchronous weighted label propagation.
//!
//! Each pass visits nodes in a freshly shuffled order and sets every node to
//! the label carrying the most incident edge weight among its neighbors,
//! smallest label on ties. Updates are visible immediately. Stops after a pass
//! without changes or after [`super::MAX_PROPAGATION_PASSES`] passes.

use std::collections::BTreeMap;

use crate::graph::{NodeId, SpatialGraph};
use crate::rng::SplitMix64;

pub(super) fn propagate(g: &SpatialGraph, seed: u64) -> Vec<usize> {
    let n = g.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    let mut votes: BTreeMap<usize, f64> = BTreeMap::new();

    for _ in 0..super::MAX_PROPAGATION_PASSES {
        rng.shuffle(&mut order);
        let mut changed = false;
        for &u in &order {
            votes.clear();
            for (v, w) in g.neighbors(NodeId(u)).expect("node in range") {
                if v.index() != u {
                    *votes.entry(labels[v.index()]).or_insert(0.0) += w;
                }
            }
            // Ascending label order, so only a strictly larger vote replaces.
            let best = votes
                .iter()
                .fold(None, |best: Option<(usize, f64)>, (&l, &w)| match best {
                    Some((_, bw)) if bw >= w => best,
                    _ => Some((l, w)),
                });
            if let Some((label, _)) = best {
                if label != labels[u] {
                    labels[u] = label;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    labels
}
