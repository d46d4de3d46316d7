//! Texture descriptors built from node measurements, plus a nearest-centroid
//! classifier.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::builders::{build_pixel_similarity_network, SimilarityParams};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};
use crate::image::GrayImage;
use crate::measurements::{node_feature_vector, NodeFeatureVector};
use crate::segmentation::LabelImage;

pub const FEATURE_COLUMNS: [&str; 10] = [
    "deg_mu", "deg_sd", "str_mu", "str_sd", "cc_mu", "cc_sd", "h2_mu", "h2_sd", "h3_mu", "h3_sd",
];

/// Mean and population standard deviation of each node feature over a
/// region, interleaved: `[deg_mu, deg_sd, str_mu, str_sd, ...]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionFeature(pub [f64; 10]);

impl RegionFeature {
    pub const ARITY: usize = 10;

    pub fn mean(&self, k: usize) -> f64 {
        self.0[2 * k]
    }

    pub fn std(&self, k: usize) -> f64 {
        self.0[2 * k + 1]
    }
}

fn summarize(vectors: &[NodeFeatureVector]) -> RegionFeature {
    let n = vectors.len() as f64;
    let mut out = [0.0; 10];
    for k in 0..NodeFeatureVector::ARITY {
        let mean = vectors.iter().map(|v| v.0[k]).sum::<f64>() / n;
        let var = vectors.iter().map(|v| (v.0[k] - mean).powi(2)).sum::<f64>() / n;
        out[2 * k] = mean;
        out[2 * k + 1] = var.sqrt();
    }
    RegionFeature(out)
}

/// Summarizes node feature vectors (measured on `g`) over `nodes`.
pub fn extract_region_features(g: &SpatialGraph, nodes: &[NodeId]) -> Result<RegionFeature> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("region has no nodes".into()));
    }
    // Sorting makes the floating-point sums independent of input order.
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    let vectors = nodes
        .par_iter()
        .map(|&u| node_feature_vector(g, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&vectors))
}

/// Features of a whole image patch taken as one region.
pub fn patch_features(img: &GrayImage, params: &SimilarityParams) -> Result<RegionFeature> {
    let g = build_pixel_similarity_network(img, params)?;
    let nodes: Vec<NodeId> = (0..g.node_count()).map(NodeId).collect();
    extract_region_features(&g, &nodes)
}

/// Features of every labelled region, each measured on the similarity network
/// of that region's pixels alone. Returned in increasing label order.
pub fn labelled_region_features(
    img: &GrayImage,
    labels: &LabelImage,
    params: &SimilarityParams,
) -> Result<Vec<(usize, RegionFeature)>> {
    if (labels.width(), labels.height()) != (img.width(), img.height()) {
        return Err(Error::InvalidParameter(format!(
            "label image is {}x{} but the image is {}x{}",
            labels.width(),
            labels.height(),
            img.width(),
            img.height()
        )));
    }
    let full = build_pixel_similarity_network(img, params)?;
    let mut regions: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for (i, l) in labels.labels().iter().enumerate() {
        if let Some(l) = l {
            regions.entry(*l).or_default().push(NodeId(i));
        }
    }
    regions
        .into_par_iter()
        .map(|(label, nodes)| {
            let sub = full.induced_subgraph(&nodes)?;
            let all: Vec<NodeId> = (0..sub.node_count()).map(NodeId).collect();
            Ok((label, extract_region_features(&sub, &all)?))
        })
        .collect()
}

/// Label of the centroid nearest to `features` after standardizing each
/// dimension by the centroid set's mean and standard deviation. Dimensions
/// constant across the centroids are ignored; ties go to the smallest label.
pub fn classify_nearest_centroid<'a>(
    features: &RegionFeature,
    centroids: &'a [(String, RegionFeature)],
) -> Result<&'a str> {
    if centroids.is_empty() {
        return Err(Error::InvalidParameter("no centroids".into()));
    }
    let n = centroids.len() as f64;
    let mut scale = Vec::new();
    for k in 0..RegionFeature::ARITY {
        let mean = centroids.iter().map(|(_, c)| c.0[k]).sum::<f64>() / n;
        let sd = (centroids
            .iter()
            .map(|(_, c)| (c.0[k] - mean).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        if sd > 0.0 {
            scale.push((k, mean, sd));
        }
    }
    let z = |f: &RegionFeature, k: usize, mean: f64, sd: f64| (f.0[k] - mean) / sd;
    let mut best: Option<(f64, &str)> = None;
    for (label, c) in centroids {
        let d: f64 = scale
            .iter()
            .map(|&(k, mean, sd)| (z(features, k, mean, sd) - z(c, k, mean, sd)).powi(2))
            .sum();
        let better = match best {
            None => true,
            Some((bd, bl)) => d < bd || (d == bd && label.as_str() < bl),
        };
        if better {
            best = Some((d, label));
        }
    }
    Ok(best.expect("centroids nonempty").1)
}

fn write_row<W: Write>(out: &mut W, key: &str, f: &RegionFeature) -> Result<()> {
    write!(out, "{key}")?;
    for v in f.0 {
        write!(out, ",{v}")?;
    }
    writeln!(out)?;
    Ok(())
}

/// CSV `region,deg_mu,deg_sd,...,h3_sd`.
pub fn write_features_csv<W: Write>(rows: &[(usize, RegionFeature)], mut out: W) -> Result<()> {
    writeln!(out, "region,{}", FEATURE_COLUMNS.join(","))?;
    for (region, f) in rows {
        write_row(&mut out, &region.to_string(), f)?;
    }
    Ok(())
}

/// Centroid CSV: the feature schema keyed by a leading `label` column.
pub fn write_centroids_csv<W: Write>(
    centroids: &[(String, RegionFeature)],
    mut out: W,
) -> Result<()> {
    writeln!(out, "label,{}", FEATURE_COLUMNS.join(","))?;
    for (label, f) in centroids {
        if label.contains(',') || label.contains('\n') {
            return Err(Error::InvalidParameter(format!(
                "label {label:?} cannot be stored in CSV"
            )));
        }
        write_row(&mut out, label, f)?;
    }
    Ok(())
}

fn parse_rows(text: &str, key: &str) -> Result<Vec<(String, RegionFeature)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty feature file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected: Vec<&str> = std::iter::once(key).chain(FEATURE_COLUMNS).collect();
    // Centroid files may keep the region column after the label.
    let skip = if columns == expected {
        0
    } else if key == "label"
        && columns.len() == 12
        && columns[1] == "region"
        && columns[2..] == expected[1..]
    {
        1
    } else {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    };
    lines
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 11 + skip {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields",
                    i + 1,
                    11 + skip
                )));
            }
            let mut f = [0.0; 10];
            for (k, s) in fields[1 + skip..].iter().enumerate() {
                f[k] = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {s:?}", i + 1)))?;
            }
            Ok((fields[0].to_string(), RegionFeature(f)))
        })
        .collect()
}

pub fn read_features_csv(text: &str) -> Result<Vec<(usize, RegionFeature)>> {
    parse_rows(text, "region")?
        .into_iter()
        .map(|(k, f)| {
            k.parse()
                .map(|r| (r, f))
                .map_err(|_| Error::Parse(format!("bad region id {k:?}")))
        })
        .collect()
}

pub fn read_centroids_csv(text: &str) -> Result<Vec<(String, RegionFeature)>> {
    parse_rows(text, "label")
}
