use crate::error::{Error, Result};
use crate::graph::{NodeId, Point2, SpatialGraph};
use crate::image::GrayImage;

use super::gradient::estimate_gradient;

/// Weights of the per-feature absolute differences summed into the pixel
/// feature distance `d`. Edge weight is `1 / (1 + d)`.
///
/// The default uses gray level only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureWeights {
    pub gray: f64,
    /// Sobel gradient magnitude.
    pub gradient: f64,
    /// Local standard deviation of gray level; needs `dispersion_radius`.
    pub dispersion: f64,
    /// Half-width of the square window used for dispersion.
    pub dispersion_radius: Option<usize>,
}

impl Default for FeatureWeights {
    fn default() -> Self {
        FeatureWeights {
            gray: 1.0,
            gradient: 0.0,
            dispersion: 0.0,
            dispersion_radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityParams {
    /// Minimum weight for an edge, in `(0, 1]`.
    pub threshold: f64,
    /// Maximum Euclidean distance between connected pixel centers.
    pub radius: f64,
    pub features: FeatureWeights,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams {
            threshold: 0.5,
            radius: 3.0,
            features: FeatureWeights::default(),
        }
    }
}

impl SimilarityParams {
    pub fn new(threshold: f64, radius: f64) -> Self {
        SimilarityParams {
            threshold,
            radius,
            ..Default::default()
        }
    }
}

fn local_dispersion(img: &GrayImage, radius: usize) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let r = radius as isize;
    let mut out = Vec::with_capacity(img.samples().len());
    for y in 0..h {
        for x in 0..w {
            let (mut sum, mut sq, mut n) = (0.0, 0.0, 0.0);
            for dy in -r..=r {
                for dx in -r..=r {
                    let xx = (x + dx).clamp(0, w - 1) as usize;
                    let yy = (y + dy).clamp(0, h - 1) as usize;
                    let v = f64::from(img.get(xx, yy));
                    sum += v;
                    sq += v * v;
                    n += 1.0;
                }
            }
            let mean = sum / n;
            out.push((sq / n - mean * mean).max(0.0).sqrt());
        }
    }
    out
}

/// Builds the pixel-similarity network.
///
/// Node `y * width + x` sits at `(x, y)`. Every unordered pixel pair within
/// `radius` gets weight `1 / (1 + d)`, `d` being the weighted feature
/// distance; the edge is kept iff the weight reaches `threshold`.
pub fn build_pixel_similarity_network(
    img: &GrayImage,
    params: &SimilarityParams,
) -> Result<SpatialGraph> {
    let SimilarityParams {
        threshold,
        radius,
        features,
    } = *params;
    if img.samples().is_empty() {
        return Err(Error::EmptyImage);
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} outside (0, 1]"
        )));
    }
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} must be >= 1"
        )));
    }
    for (name, w) in [
        ("gray", features.gray),
        ("gradient", features.gradient),
        ("dispersion", features.dispersion),
    ] {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} weight {w} must be >= 0"
            )));
        }
    }

    let (width, height) = (img.width(), img.height());
    let gradient = if features.gradient > 0.0 {
        Some(estimate_gradient(img)?)
    } else {
        None
    };
    let dispersion = match (features.dispersion > 0.0, features.dispersion_radius) {
        (false, _) => None,
        (true, Some(r)) => Some(local_dispersion(img, r)),
        (true, None) => {
            return Err(Error::InvalidParameter(
                "dispersion weight set without a dispersion window".into(),
            ))
        }
    };
    let distance = |i: usize, j: usize| {
        let s = img.samples();
        let mut d = features.gray * (f64::from(s[i]) - f64::from(s[j])).abs();
        if let Some(g) = &gradient {
            d += features.gradient * (g.magnitude_at(i) - g.magnitude_at(j)).abs();
        }
        if let Some(disp) = &dispersion {
            d += features.dispersion * (disp[i] - disp[j]).abs();
        }
        d
    };

    // Forward half of the disc: each unordered pair is visited once.
    let reach = radius.floor() as isize;
    let mut offsets = Vec::new();
    for dy in 0..=reach {
        for dx in -reach..=reach {
            if (dy == 0 && dx <= 0) || ((dx * dx + dy * dy) as f64) > radius * radius {
                continue;
            }
            offsets.push((dx, dy));
        }
    }

    let mut graph = SpatialGraph::new_undirected().with_bounds(width as f64, height as f64);
    for y in 0..height {
        for x in 0..width {
            graph.add_node(Some(Point2::new(x as f64, y as f64)))?;
        }
    }
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            for &(dx, dy) in &offsets {
                let (xx, yy) = (x as isize + dx, y as isize + dy);
                if xx < 0 || xx >= width as isize || yy >= height as isize {
                    continue;
                }
                let j = yy as usize * width + xx as usize;
                let w = 1.0 / (1.0 + distance(i, j));
                if w >= threshold {
                    graph.add_edge(NodeId(i), NodeId(j), w)?;
                }
            }
        }
    }
    Ok(graph)
}
