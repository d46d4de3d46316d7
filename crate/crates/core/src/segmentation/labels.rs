use std::io::Write;

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};
use crate::image::GrayImage;

/// Per-pixel region label; `None` marks pixels without a graph node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: usize,
    height: usize,
    labels: Vec<Option<usize>>,
}

impl LabelImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<usize> {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    /// Preview image: background 0, label `l` drawn as `l % 255 + 1`.
    pub fn to_preview(&self) -> GrayImage {
        let samples = self
            .labels
            .iter()
            .map(|l| l.map_or(0, |l| (l % 255) as u8 + 1))
            .collect();
        GrayImage::new(self.width, self.height, samples).expect("dimensions already validated")
    }

    /// CSV `x,y,label` in scan-line order; background pixels carry `-1`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,label")?;
        for y in 0..self.height {
            for x in 0..self.width {
                match self.get(x, y) {
                    Some(l) => writeln!(out, "{x},{y},{l}")?,
                    None => writeln!(out, "{x},{y},-1")?,
                }
            }
        }
        Ok(())
    }

    /// Parses the CSV written by [`LabelImage::write_csv`].
    pub fn read_csv(text: &str, width: usize, height: usize) -> Result<LabelImage> {
        let mut labels = vec![None; width * height];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('x')) {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected x,y,label", i + 1));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad());
            }
            let x: usize = fields[0].parse().map_err(|_| bad())?;
            let y: usize = fields[1].parse().map_err(|_| bad())?;
            let label: i64 = fields[2].parse().map_err(|_| bad())?;
            if x >= width || y >= height {
                return Err(Error::PixelOutOfBounds {
                    x,
                    y,
                    width,
                    height,
                });
            }
            labels[y * width + x] = usize::try_from(label).ok();
        }
        Ok(LabelImage {
            width,
            height,
            labels,
        })
    }
}

/// Paints each node's community at its pixel position. Communities are
/// renumbered by decreasing size (ties keep the original label order).
pub fn partition_to_label_image(
    p: &Partition,
    g: &SpatialGraph,
    width: usize,
    height: usize,
) -> Result<LabelImage> {
    if p.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            expected: g.node_count(),
            actual: p.len(),
        });
    }
    let sizes = p.community_sizes();
    let mut by_size: Vec<usize> = (0..sizes.len()).collect();
    by_size.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), c));
    let mut rank = vec![0; sizes.len()];
    for (r, &c) in by_size.iter().enumerate() {
        rank[c] = r;
    }

    let mut labels = vec![None; width * height];
    for u in 0..g.node_count() {
        let pos = g
            .position(NodeId(u))?
            .ok_or_else(|| Error::InvalidParameter(format!("node {u} has no pixel position")))?;
        let (x, y) = (pos.x, pos.y);
        let inside = x >= 0.0 && y >= 0.0 && x < width as f64 && y < height as f64;
        if !inside || x.fract() != 0.0 || y.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "node {u} at ({x}, {y}) is not a pixel of the {width}x{height} image"
            )));
        }
        labels[y as usize * width + x as usize] = Some(rank[p.labels()[u]]);
    }
    Ok(LabelImage {
        width,
        height,
        labels,
    })
}
