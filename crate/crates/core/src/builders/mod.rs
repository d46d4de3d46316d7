//! Image-to-network construction.
//!
//! Two constructions are provided: the pixel-similarity network (one node per
//! pixel, edges between nearby pixels with similar local features) and the
//! orientation-line network (one node per high-contrast pixel, edges to every
//! other high-contrast pixel lying on the line through it along the local
//! contour tangent or normal).

mod gradient;
mod lines;
mod similarity;

pub use gradient::{estimate_gradient, select_edge_pixels, EdgePixel, EdgePixelSet, GradientField};
pub use lines::{build_orientation_line_network, rasterize_line, LineMode};
pub use similarity::{build_pixel_similarity_network, FeatureWeights, SimilarityParams};
