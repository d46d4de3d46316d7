//! Plain-text edge-list format.
//!
//! ```text
//! # nodes 3 directed 0
//! 0 1 1.0000000000000000e0
//! 1 2 3.9062500000000000e-3
//! ```
//!
//! Weights are written with 17 significant digits, which round-trips every
//! `f64` exactly. Undirected edges are listed once with `u <= v`. Node
//! positions live in an optional companion CSV with header `id,x,y`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Point2, SpatialGraph};

pub fn write_edge_list<W: Write>(graph: &SpatialGraph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# nodes {} directed {}",
        graph.node_count(),
        u8::from(graph.is_directed())
    )?;
    for (u, v, w) in graph.edges() {
        writeln!(out, "{} {} {:.16e}", u, v, w)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_positions<W: Write>(graph: &SpatialGraph, mut out: W) -> Result<()> {
    writeln!(out, "id,x,y")?;
    for u in 0..graph.node_count() {
        if let Some(p) = graph.position(NodeId(u))? {
            writeln!(out, "{},{},{}", u, p.x, p.y)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_header(line: &str) -> Option<(usize, bool)> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    match tokens.as_slice() {
        ["#", "nodes", n, "directed", d] => {
            let directed = match *d {
                "0" => false,
                "1" => true,
                _ => return None,
            };
            Some((n.parse().ok()?, directed))
        }
        _ => None,
    }
}

/// Reads positions CSV into a per-node table of length `node_count`.
pub fn read_positions<R: BufRead>(input: R, node_count: usize) -> Result<Vec<Option<Point2>>> {
    let mut positions = vec![None; node_count];
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("id")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(i + 1, "expected id,x,y"));
        }
        let id: usize = fields[0].parse().map_err(|e| parse_err(i + 1, e))?;
        let x: f64 = fields[1].parse().map_err(|e| parse_err(i + 1, e))?;
        let y: f64 = fields[2].parse().map_err(|e| parse_err(i + 1, e))?;
        let slot = positions
            .get_mut(id)
            .ok_or_else(|| parse_err(i + 1, format!("node {id} out of range")))?;
        *slot = Some(Point2::new(x, y));
    }
    Ok(positions)
}

/// Reads an edge list, optionally attaching positions from a companion CSV.
pub fn read_edge_list<R: BufRead, P: BufRead>(
    input: R,
    positions: Option<P>,
) -> Result<SpatialGraph> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header"))??;
    let (node_count, directed) =
        parse_header(&header).ok_or_else(|| parse_err(1, "expected `# nodes N directed {0|1}`"))?;

    let mut triples = Vec::new();
    let mut has_loops = false;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 2;
        let mut it = line.split_whitespace();
        let (Some(u), Some(v), Some(w), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(parse_err(lineno, "expected `u v w`"));
        };
        let u: usize = u.parse().map_err(|e| parse_err(lineno, e))?;
        let v: usize = v.parse().map_err(|e| parse_err(lineno, e))?;
        let w: f64 = w.parse().map_err(|e| parse_err(lineno, e))?;
        has_loops |= u == v;
        triples.push((u, v, w));
    }

    let positions = match positions {
        Some(p) => read_positions(p, node_count)?,
        None => vec![None; node_count],
    };
    let mut graph = SpatialGraph::with_directedness(directed);
    if has_loops {
        graph = graph.allow_self_loops();
    }
    for p in positions {
        graph.add_node(p)?;
    }
    for (u, v, w) in triples {
        graph.add_edge(NodeId(u), NodeId(v), w)?;
    }
    Ok(graph)
}
