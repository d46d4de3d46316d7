//! Random-walk saliency.
//!
//! A walker on the orientation-line network moves from node `j` to neighbor
//! `i` with probability proportional to `w_ij * s_i`, where `s` is an optional
//! per-node prior saliency index. The stationary occupancy `q = W q` of that
//! walk is the saliency signal.

use std::io::Write;

use crate::builders::{
    build_orientation_line_network, estimate_gradient, select_edge_pixels, EdgePixelSet, LineMode,
};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};
use crate::image::GrayImage;

/// Column sums must match 1 within this bound.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;

/// Strictly positive prior index per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyIndexVector(Vec<f64>);

impl SaliencyIndexVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "saliency index {v} at node {i} must be positive"
            )));
        }
        Ok(SaliencyIndexVector(values))
    }

    pub fn uniform(n: usize) -> Self {
        SaliencyIndexVector(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Sparse column-stochastic matrix; column `j` lists the transition
/// probabilities out of node `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    columns: Vec<Vec<(usize, f64)>>,
    /// Stationary mass of each node up to a per-component constant; used to
    /// weight disconnected components against each other.
    node_mass: Vec<f64>,
}

impl StochasticMatrix {
    /// Validates explicit columns. Components are weighted by node count.
    pub fn from_columns(columns: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = columns.len();
        let m = StochasticMatrix {
            columns,
            node_mass: vec![1.0; n],
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for (j, col) in self.columns.iter().enumerate() {
            let mut sum = 0.0;
            for &(i, p) in col {
                if i >= n {
                    return Err(Error::NotStochastic(format!(
                        "row {i} outside dimension {n}"
                    )));
                }
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(Error::NotStochastic(format!("entry ({i}, {j}) = {p}")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic(format!("column {j} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j]
            .iter()
            .find(|&&(r, _)| r == i)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut dense = vec![vec![0.0; n]; n];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, p) in col {
                dense[i][j] += p;
            }
        }
        dense
    }

    /// `W q`, accumulated column by column.
    pub fn apply(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (col, &qj) in self.columns.iter().zip(q) {
            for &(i, p) in col {
                out[i] += p * qj;
            }
        }
        out
    }

    /// `||W q - q||_1`.
    pub fn residual_l1(&self, q: &[f64]) -> f64 {
        self.apply(q)
            .iter()
            .zip(q)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Component label per node over the symmetrized nonzero pattern.
    fn components(&self) -> (Vec<usize>, usize) {
        let n = self.dim();
        let mut adj = vec![Vec::new(); n];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, p) in col {
                if p > 0.0 && i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }
}

/// Builds `W_ij = w_ij s_i / sum_m w_mj s_m` over the out-neighbors of `j`.
///
/// Every node needs at least one outgoing edge; isolated nodes must be
/// filtered out beforehand (see [`walk_occupancy`]).
pub fn build_stochastic_matrix(
    g: &SpatialGraph,
    s: &SaliencyIndexVector,
) -> Result<StochasticMatrix> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "walk needs at least one node".into(),
        ));
    }
    if s.0.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: s.0.len(),
        });
    }
    let mut columns = Vec::with_capacity(n);
    let mut node_mass = Vec::with_capacity(n);
    for j in 0..n {
        let biased: Vec<(usize, f64)> = g
            .neighbors(NodeId(j))?
            .map(|(i, w)| (i.index(), w * s.0[i.index()]))
            .collect();
        let total: f64 = biased.iter().map(|&(_, b)| b).sum();
        if biased.is_empty() || !(total > 0.0) {
            return Err(Error::NoOutgoingMass(j));
        }
        columns.push(biased.into_iter().map(|(i, b)| (i, b / total)).collect());
        // Detailed balance of the biased walk on an undirected graph gives
        // stationary mass proportional to s_j * sum_m w_mj s_m.
        node_mass.push(s.0[j] * total);
    }
    let m = StochasticMatrix { columns, node_mass };
    m.validate()?;
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once one lazy step changes `q` by at most this much in L1.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Stationary occupancy per node; sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyVector(pub Vec<f64>);

impl OccupancyVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Solves `q = W q` by power iteration on the lazy operator `(W + I) / 2`,
/// starting from the uniform vector.
///
/// Each connected component is solved on its own and scaled by its share of
/// total node mass, so the result does not depend on component order.
pub fn stationary_distribution(
    w: &StochasticMatrix,
    opts: &SolverOptions,
) -> Result<OccupancyVector> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {} must be positive",
            opts.tol
        )));
    }
    let n = w.dim();
    let (label, count) = w.components();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (u, &c) in label.iter().enumerate() {
        members[c].push(u);
    }
    let total_mass: f64 = w.node_mass.iter().sum();

    let mut q = vec![0.0; n];
    let mut local = vec![usize::MAX; n];
    for nodes in &members {
        for (k, &u) in nodes.iter().enumerate() {
            local[u] = k;
        }
        let size = nodes.len();
        let mut cur = vec![1.0 / size as f64; size];
        let mut next = vec![0.0; size];
        let mut converged = false;
        let mut prev_change = f64::INFINITY;
        for _ in 0..opts.max_iter {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (k, &j) in nodes.iter().enumerate() {
                for &(i, p) in &w.columns[j] {
                    next[local[i]] += p * cur[k];
                }
            }
            let mut change = 0.0;
            for (nx, &c) in next.iter_mut().zip(&cur) {
                *nx = 0.5 * (*nx + c);
                change += (*nx - c).abs();
            }
            std::mem::swap(&mut cur, &mut next);
            // Geometric tail estimate: with contraction rate rho the distance
            // left to the fixed point is about change * rho / (1 - rho).
            let rho = change / prev_change;
            prev_change = change;
            let remaining = if rho < 1.0 {
                change * rho / (1.0 - rho)
            } else {
                f64::INFINITY
            };
            if change == 0.0 || (change <= opts.tol && remaining <= opts.tol) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NotConverged(opts.max_iter));
        }
        let sum: f64 = cur.iter().sum();
        let share = nodes.iter().map(|&u| w.node_mass[u]).sum::<f64>() / total_mass;
        for (k, &u) in nodes.iter().enumerate() {
            q[u] = cur[k] / sum * share;
        }
    }
    Ok(OccupancyVector(q))
}

/// Occupancy over all nodes of `g`. Nodes without edges are left out of the
/// walk and get occupancy 0.
pub fn walk_occupancy(
    g: &SpatialGraph,
    s: &SaliencyIndexVector,
    opts: &SolverOptions,
) -> Result<OccupancyVector> {
    if s.0.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            expected: g.node_count(),
            actual: s.0.len(),
        });
    }
    let walk_nodes: Vec<NodeId> = (0..g.node_count())
        .map(NodeId)
        .filter(|&u| g.degree(u).is_ok_and(|d| d > 0))
        .collect();
    if walk_nodes.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let sub = g.induced_subgraph(&walk_nodes)?;
    let sub_s = SaliencyIndexVector(walk_nodes.iter().map(|u| s.0[u.index()]).collect());
    let w = build_stochastic_matrix(&sub, &sub_s)?;
    let local = stationary_distribution(&w, opts)?;
    let mut q = vec![0.0; g.node_count()];
    for (u, qi) in walk_nodes.iter().zip(local.0) {
        q[u.index()] = qi;
    }
    Ok(OccupancyVector(q))
}

/// Paints edge pixels with occupancy rescaled linearly so the smallest maps
/// to 1 and the largest to 255 (255 everywhere when all are equal). Other
/// pixels are 0.
pub fn saliency_map(
    width: usize,
    height: usize,
    edges: &EdgePixelSet,
    q: &OccupancyVector,
) -> Result<GrayImage> {
    if q.len() != edges.len() {
        return Err(Error::LengthMismatch {
            expected: edges.len(),
            actual: q.len(),
        });
    }
    if (width, height) != (edges.width(), edges.height()) {
        return Err(Error::InvalidParameter(format!(
            "map size {width}x{height} differs from edge set {}x{}",
            edges.width(),
            edges.height()
        )));
    }
    let mut samples = vec![0u8; width * height];
    let lo = q.0.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = q.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (p, &qi) in edges.pixels().iter().zip(&q.0) {
        let v = if hi > lo {
            1.0 + 254.0 * (qi - lo) / (hi - lo)
        } else {
            255.0
        };
        samples[p.y * width + p.x] = v.round() as u8;
    }
    GrayImage::new(width, height, samples)
}

/// CSV `node,x,y,q,occupancy_ratio`; the ratio is `q * N` with `N` the node
/// count, i.e. occupancy relative to a uniform walker.
pub fn write_occupancy_csv<W: Write>(
    edges: &EdgePixelSet,
    q: &OccupancyVector,
    mut out: W,
) -> Result<()> {
    if q.len() != edges.len() {
        return Err(Error::LengthMismatch {
            expected: edges.len(),
            actual: q.len(),
        });
    }
    let n = q.len() as f64;
    writeln!(out, "node,x,y,q,occupancy_ratio")?;
    for (i, (p, &qi)) in edges.pixels().iter().zip(&q.0).enumerate() {
        writeln!(out, "{},{},{},{},{}", i, p.x, p.y, qi, qi * n)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaliencyParams {
    /// Fraction of the maximum gradient magnitude an edge pixel must reach.
    pub contrast: f64,
    pub mode: LineMode,
    pub solver: SolverOptions,
}

impl Default for SaliencyParams {
    fn default() -> Self {
        SaliencyParams {
            contrast: 0.25,
            mode: LineMode::Tangent,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SaliencyOutput {
    pub edges: EdgePixelSet,
    pub network: SpatialGraph,
    pub occupancy: OccupancyVector,
    pub map: GrayImage,
}

/// Full image pipeline: gradient, edge selection, line network, walk, map.
/// `prior(x, y)` supplies the saliency index of each edge pixel.
pub fn detect_saliency(
    img: &GrayImage,
    params: &SaliencyParams,
    prior: impl Fn(usize, usize) -> f64,
) -> Result<SaliencyOutput> {
    let field = estimate_gradient(img)?;
    let edges = select_edge_pixels(&field, params.contrast)?;
    if edges.is_empty() {
        return Err(Error::NoEdgePixels);
    }
    let network = build_orientation_line_network(&edges, params.mode)?;
    let s = SaliencyIndexVector::new(edges.pixels().iter().map(|p| prior(p.x, p.y)).collect())?;
    let occupancy = walk_occupancy(&network, &s, &params.solver)?;
    let map = saliency_map(img.width(), img.height(), &edges, &occupancy)?;
    Ok(SaliencyOutput {
        edges,
        network,
        occupancy,
        map,
    })
}
