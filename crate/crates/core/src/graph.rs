//! Weighted spatial graph storage.
//!
//! Nodes are dense integer ids with optional 2D positions (pixel units for
//! image networks, layout coordinates for processor topologies). Adjacency is
//! kept per node in a sorted map so iteration order is deterministic.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }
}

/// Weighted graph whose nodes may carry 2D positions.
///
/// Undirected graphs store both directions of every edge with the same
/// weight. All weights are strictly positive. Self-loops are rejected unless
/// enabled with [`SpatialGraph::allow_self_loops`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGraph {
    directed: bool,
    self_loops: bool,
    bounds: Option<(f64, f64)>,
    positions: Vec<Option<Point2>>,
    adjacency: Vec<BTreeMap<usize, f64>>,
}

impl SpatialGraph {
    pub fn new_undirected() -> Self {
        Self::with_directedness(false)
    }

    pub fn new_directed() -> Self {
        Self::with_directedness(true)
    }

    pub fn with_directedness(directed: bool) -> Self {
        SpatialGraph {
            directed,
            self_loops: false,
            bounds: None,
            positions: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    /// Declares the region `[0, width) x [0, height)` positions must fall in.
    pub fn with_bounds(mut self, width: f64, height: f64) -> Self {
        self.bounds = Some((width, height));
        self
    }

    pub fn allow_self_loops(mut self) -> Self {
        self.self_loops = true;
        self
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn self_loops_allowed(&self) -> bool {
        self.self_loops
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of edges; undirected edges are counted once.
    pub fn edge_count(&self) -> usize {
        let entries: usize = self.adjacency.iter().map(BTreeMap::len).sum();
        if self.directed {
            entries
        } else {
            let loops = self
                .adjacency
                .iter()
                .enumerate()
                .filter(|(u, adj)| adj.contains_key(u))
                .count();
            (entries - loops) / 2 + loops
        }
    }

    pub fn add_node(&mut self, position: Option<Point2>) -> Result<NodeId> {
        if let Some(p) = position {
            self.check_position(p)?;
        }
        self.positions.push(position);
        self.adjacency.push(BTreeMap::new());
        Ok(NodeId(self.adjacency.len() - 1))
    }

    fn check_position(&self, p: Point2) -> Result<()> {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::NonFinitePosition { x: p.x, y: p.y });
        }
        if let Some((width, height)) = self.bounds {
            if p.x < 0.0 || p.y < 0.0 || p.x >= width || p.y >= height {
                return Err(Error::PositionOutOfBounds {
                    x: p.x,
                    y: p.y,
                    width,
                    height,
                });
            }
        }
        Ok(())
    }

    /// Adds an edge, replacing the weight of an existing one.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: f64) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidWeight(weight));
        }
        if u == v && !self.self_loops {
            return Err(Error::SelfLoop(u.0));
        }
        self.adjacency[u.0].insert(v.0, weight);
        if !self.directed {
            self.adjacency[v.0].insert(u.0, weight);
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, u: NodeId) -> bool {
        u.0 < self.adjacency.len()
    }

    pub(crate) fn check_node(&self, u: NodeId) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::UnknownNode(u.0))
        }
    }

    pub fn position(&self, u: NodeId) -> Result<Option<Point2>> {
        self.check_node(u)?;
        Ok(self.positions[u.0])
    }

    /// Neighbors of `u` (out-neighbors if directed) with edge weights, in
    /// increasing id order.
    pub fn neighbors(&self, u: NodeId) -> Result<impl Iterator<Item = (NodeId, f64)> + '_> {
        self.check_node(u)?;
        Ok(self.adjacency[u.0].iter().map(|(&v, &w)| (NodeId(v), w)))
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.adjacency.get(u.0)?.get(&v.0).copied()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    /// All edges as `(u, v, w)`; undirected edges appear once with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        let directed = self.directed;
        self.adjacency.iter().enumerate().flat_map(move |(u, adj)| {
            adj.iter()
                .filter(move |(&v, _)| directed || u <= v)
                .map(move |(&v, &w)| (NodeId(u), NodeId(v), w))
        })
    }

    pub fn degree(&self, u: NodeId) -> Result<usize> {
        self.check_node(u)?;
        Ok(self.adjacency[u.0].len())
    }

    pub fn strength(&self, u: NodeId) -> Result<f64> {
        self.check_node(u)?;
        Ok(self.adjacency[u.0].values().sum())
    }

    /// Unweighted hop distances from `u`; `None` marks unreachable nodes.
    pub fn shortest_path_lengths(&self, u: NodeId) -> Result<Vec<Option<usize>>> {
        self.check_node(u)?;
        Ok(self.bfs(u.0, usize::MAX))
    }

    /// BFS from `source` that stops expanding beyond `max_depth`.
    pub(crate) fn bfs(&self, source: usize, max_depth: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            if d >= max_depth {
                continue;
            }
            for &y in self.adjacency[x].keys() {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Component label per node (weak connectivity for directed graphs),
    /// numbered in order of lowest member id.
    pub fn connected_components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut reverse: Vec<Vec<usize>> = Vec::new();
        if self.directed {
            reverse = vec![Vec::new(); n];
            for (u, adj) in self.adjacency.iter().enumerate() {
                for &v in adj.keys() {
                    reverse[v].push(u);
                }
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(x) = stack.pop() {
                let forward = self.adjacency[x].keys().copied();
                let backward = reverse.get(x).into_iter().flatten().copied();
                for y in forward.chain(backward) {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced by `nodes`; node `nodes[i]` becomes node `i`.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<SpatialGraph> {
        let mut index = vec![usize::MAX; self.node_count()];
        let mut sub = SpatialGraph {
            directed: self.directed,
            self_loops: self.self_loops,
            bounds: self.bounds,
            positions: Vec::with_capacity(nodes.len()),
            adjacency: Vec::with_capacity(nodes.len()),
        };
        for &u in nodes {
            self.check_node(u)?;
            if index[u.0] != usize::MAX {
                return Err(Error::InvalidParameter(format!("node {u} listed twice")));
            }
            index[u.0] = sub.add_node(self.positions[u.0])?.0;
        }
        for &u in nodes {
            let iu = index[u.0];
            for (&v, &w) in &self.adjacency[u.0] {
                if index[v] != usize::MAX {
                    sub.adjacency[iu].insert(index[v], w);
                }
            }
        }
        Ok(sub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SpatialGraph {
        let mut g = SpatialGraph::new_undirected();
        for _ in 0..n {
            g.add_node(None).unwrap();
        }
        for i in 1..n {
            g.add_edge(NodeId(i - 1), NodeId(i), 1.0).unwrap();
        }
        g
    }

    fn ring(n: usize) -> SpatialGraph {
        let mut g = path(n);
        g.add_edge(NodeId(n - 1), NodeId(0), 1.0).unwrap();
        g
    }

    #[test]
    fn node_ids_are_dense() {
        let mut g = SpatialGraph::new_undirected();
        assert_eq!(g.add_node(Some(Point2::new(0.0, 0.0))).unwrap(), NodeId(0));
        assert_eq!(g.add_node(None).unwrap(), NodeId(1));
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn rejects_bad_positions() {
        let mut g = SpatialGraph::new_undirected();
        assert!(matches!(
            g.add_node(Some(Point2::new(f64::NAN, 0.0))),
            Err(Error::NonFinitePosition { .. })
        ));
        let mut g = SpatialGraph::new_undirected().with_bounds(4.0, 4.0);
        assert!(g.add_node(Some(Point2::new(3.0, 3.0))).is_ok());
        assert!(matches!(
            g.add_node(Some(Point2::new(4.0, 0.0))),
            Err(Error::PositionOutOfBounds { .. })
        ));
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn undirected_edges_are_symmetric() {
        let mut g = path(2);
        let n0: Vec<_> = g.neighbors(NodeId(0)).unwrap().collect();
        let n1: Vec<_> = g.neighbors(NodeId(1)).unwrap().collect();
        assert_eq!(n0, vec![(NodeId(1), 1.0)]);
        assert_eq!(n1, vec![(NodeId(0), 1.0)]);
        g.add_edge(NodeId(1), NodeId(0), 0.25).unwrap();
        assert_eq!(g.edge_weight(NodeId(0), NodeId(1)), Some(0.25));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn edge_errors() {
        let mut g = path(2);
        assert_eq!(
            g.add_edge(NodeId(0), NodeId(0), 1.0),
            Err(Error::SelfLoop(0))
        );
        assert_eq!(
            g.add_edge(NodeId(0), NodeId(1), 0.0),
            Err(Error::InvalidWeight(0.0))
        );
        assert!(g.add_edge(NodeId(0), NodeId(1), f64::INFINITY).is_err());
        assert_eq!(
            g.add_edge(NodeId(0), NodeId(5), 1.0),
            Err(Error::UnknownNode(5))
        );
        let mut g = SpatialGraph::new_undirected().allow_self_loops();
        g.add_node(None).unwrap();
        g.add_edge(NodeId(0), NodeId(0), 1.0).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn directed_edges_are_one_way() {
        let mut g = SpatialGraph::new_directed();
        g.add_node(None).unwrap();
        g.add_node(None).unwrap();
        g.add_edge(NodeId(0), NodeId(1), 2.0).unwrap();
        assert_eq!(g.degree(NodeId(0)).unwrap(), 1);
        assert_eq!(g.degree(NodeId(1)).unwrap(), 0);
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_connected());
    }

    #[test]
    fn degree_and_strength() {
        let mut g = SpatialGraph::new_undirected();
        for _ in 0..5 {
            g.add_node(None).unwrap();
        }
        assert_eq!(g.degree(NodeId(0)).unwrap(), 0);
        assert_eq!(g.strength(NodeId(0)).unwrap(), 0.0);
        for leaf in 1..5 {
            g.add_edge(NodeId(0), NodeId(leaf), 0.5).unwrap();
        }
        assert_eq!(g.degree(NodeId(0)).unwrap(), 4);
        assert_eq!(g.strength(NodeId(0)).unwrap(), 2.0);
        assert_eq!(g.degree(NodeId(9)), Err(Error::UnknownNode(9)));

        let tri = ring(3);
        for u in 0..3 {
            assert_eq!(tri.degree(NodeId(u)).unwrap(), 2);
            assert_eq!(tri.strength(NodeId(u)).unwrap(), 2.0);
        }
    }

    #[test]
    fn bfs_distances() {
        let g = path(3);
        assert_eq!(
            g.shortest_path_lengths(NodeId(0)).unwrap(),
            vec![Some(0), Some(1), Some(2)]
        );
        let mut g = path(2);
        g.add_node(None).unwrap();
        assert_eq!(g.shortest_path_lengths(NodeId(0)).unwrap()[2], None);
        let r = ring(6);
        assert_eq!(r.shortest_path_lengths(NodeId(0)).unwrap()[3], Some(3));
        assert!(r.shortest_path_lengths(NodeId(6)).is_err());
    }

    #[test]
    fn components_and_induced_subgraph() {
        let mut g = path(3);
        g.add_node(None).unwrap();
        g.add_node(None).unwrap();
        g.add_edge(NodeId(3), NodeId(4), 1.0).unwrap();
        assert_eq!(g.connected_components(), vec![0, 0, 0, 1, 1]);
        assert!(!g.is_connected());

        let sub = g
            .induced_subgraph(&[NodeId(2), NodeId(1), NodeId(4)])
            .unwrap();
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edge_count(), 1);
        assert!(sub.has_edge(NodeId(0), NodeId(1)));
        assert!(g.induced_subgraph(&[NodeId(1), NodeId(1)]).is_err());
    }
}
