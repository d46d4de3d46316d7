use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Point2, SpatialGraph};

use super::gradient::{fold_orientation, EdgePixelSet};

/// Slack on the half-pixel corridor so that rounding in `sin`/`cos` cannot
/// make `alpha` and `alpha + pi` select different pixels.
const CORRIDOR_SLACK: f64 = 1e-9;
const HALF_WIDTH: f64 = 0.5 + CORRIDOR_SLACK;

/// Which line each edge pixel casts: along the contour or across it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineMode {
    #[default]
    Tangent,
    Normal,
}

/// Pixels whose centers lie within half a pixel of the infinite line through
/// `p` with direction `(cos alpha, sin alpha)`, clipped to the image and
/// returned in scan-line order.
pub fn rasterize_line(
    p: (usize, usize),
    alpha: f64,
    width: usize,
    height: usize,
) -> Result<Vec<(usize, usize)>> {
    let (px, py) = p;
    if px >= width || py >= height {
        return Err(Error::PixelOutOfBounds {
            x: px,
            y: py,
            width,
            height,
        });
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "line angle {alpha} is not finite"
        )));
    }
    let alpha = fold_orientation(alpha);
    let (s, c) = alpha.sin_cos();
    let (pxf, pyf) = (px as f64, py as f64);
    let on_line =
        |x: usize, y: usize| ((x as f64 - pxf) * s - (y as f64 - pyf) * c).abs() <= HALF_WIDTH;

    let mut out = Vec::new();
    if c.abs() >= s.abs() {
        // Mostly horizontal: at most two rows per column.
        let span = HALF_WIDTH / c.abs();
        for x in 0..width {
            let center = pyf + (x as f64 - pxf) * s / c;
            let lo = (center - span).floor() - 1.0;
            let hi = (center + span).ceil() + 1.0;
            if hi < 0.0 || lo > (height - 1) as f64 {
                continue;
            }
            let lo = lo.max(0.0) as usize;
            let hi = (hi as usize).min(height - 1);
            out.extend((lo..=hi).filter(|&y| on_line(x, y)).map(|y| (x, y)));
        }
    } else {
        let span = HALF_WIDTH / s.abs();
        for y in 0..height {
            let center = pxf + (y as f64 - pyf) * c / s;
            let lo = (center - span).floor() - 1.0;
            let hi = (center + span).ceil() + 1.0;
            if hi < 0.0 || lo > (width - 1) as f64 {
                continue;
            }
            let lo = lo.max(0.0) as usize;
            let hi = (hi as usize).min(width - 1);
            out.extend((lo..=hi).filter(|&x| on_line(x, y)).map(|x| (x, y)));
        }
    }
    out.sort_unstable_by_key(|&(x, y)| (y, x));
    Ok(out)
}

/// Builds the orientation-line network: node `i` is the `i`-th edge pixel;
/// each pixel is joined by a unit-weight undirected edge to every other edge
/// pixel on its tangent (or normal) line.
pub fn build_orientation_line_network(
    edges: &EdgePixelSet,
    mode: LineMode,
) -> Result<SpatialGraph> {
    if edges.is_empty() {
        return Err(Error::NoEdgePixels);
    }
    let (width, height) = (edges.width(), edges.height());
    let mut index = vec![usize::MAX; width * height];
    let mut graph = SpatialGraph::new_undirected().with_bounds(width as f64, height as f64);
    for (i, p) in edges.pixels().iter().enumerate() {
        graph.add_node(Some(Point2::new(p.x as f64, p.y as f64)))?;
        index[p.y * width + p.x] = i;
    }
    for (i, p) in edges.pixels().iter().enumerate() {
        let alpha = match mode {
            LineMode::Tangent => p.orientation + FRAC_PI_2,
            LineMode::Normal => p.orientation,
        };
        for (x, y) in rasterize_line((p.x, p.y), alpha, width, height)? {
            let j = index[y * width + x];
            if j != usize::MAX && j != i {
                graph.add_edge(NodeId(i), NodeId(j), 1.0)?;
            }
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, PI};

    use super::*;
    use crate::builders::EdgePixel;

    /// Oracle: test every pixel of the image against the corridor.
    fn brute_force(p: (usize, usize), alpha: f64, w: usize, h: usize) -> Vec<(usize, usize)> {
        let a = fold_orientation(alpha);
        let (s, c) = a.sin_cos();
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let d = ((x as f64 - p.0 as f64) * s - (y as f64 - p.1 as f64) * c).abs();
                if d <= HALF_WIDTH {
                    out.push((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn axis_aligned_lines() {
        let row = rasterize_line((2, 2), 0.0, 5, 5).unwrap();
        assert_eq!(row, (0..5).map(|x| (x, 2)).collect::<Vec<_>>());
        let col = rasterize_line((2, 2), FRAC_PI_2, 5, 5).unwrap();
        assert_eq!(col, (0..5).map(|y| (2, y)).collect::<Vec<_>>());
    }

    #[test]
    fn diagonal_line() {
        let diag = rasterize_line((0, 0), FRAC_PI_4, 5, 5).unwrap();
        for i in 0..5 {
            assert!(diag.contains(&(i, i)));
        }
        assert_eq!(diag, brute_force((0, 0), FRAC_PI_4, 5, 5));
        // Off-diagonal pixels are 1/sqrt(2) away from the line.
        assert_eq!(diag.len(), 5);
    }

    #[test]
    fn matches_brute_force_over_angles() {
        for k in 0..720 {
            let alpha = k as f64 * PI / 360.0 - PI;
            for p in [(0, 0), (3, 7), (10, 2), (11, 12)] {
                assert_eq!(
                    rasterize_line(p, alpha, 12, 13).unwrap(),
                    brute_force(p, alpha, 12, 13),
                    "alpha={alpha} p={p:?}"
                );
            }
        }
    }

    #[test]
    fn out_of_bounds_start() {
        assert!(rasterize_line((5, 0), 0.0, 5, 5).is_err());
        assert!(rasterize_line((0, 0), f64::NAN, 5, 5).is_err());
    }

    fn row_contour(k: usize) -> EdgePixelSet {
        // Horizontal contour: gradient points along y, normal orientation pi/2.
        let pixels = (0..k)
            .map(|x| EdgePixel {
                x: x + 1,
                y: 3,
                orientation: FRAC_PI_2,
                magnitude: 1.0,
            })
            .collect();
        EdgePixelSet::new(k + 2, 7, pixels).unwrap()
    }

    #[test]
    fn straight_contour_tangent_is_clique() {
        let k = 6;
        let g = build_orientation_line_network(&row_contour(k), LineMode::Tangent).unwrap();
        assert_eq!(g.node_count(), k);
        assert_eq!(g.edge_count(), k * (k - 1) / 2);
    }

    #[test]
    fn straight_contour_normal_has_no_edges() {
        let g = build_orientation_line_network(&row_contour(6), LineMode::Normal).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn single_pixel_and_empty_sets() {
        let g = build_orientation_line_network(&row_contour(1), LineMode::Tangent).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let empty = EdgePixelSet::new(4, 4, vec![]).unwrap();
        assert_eq!(
            build_orientation_line_network(&empty, LineMode::Tangent),
            Err(Error::NoEdgePixels)
        );
    }
}
