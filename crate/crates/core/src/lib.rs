//! Spatial complex networks for image analysis and distributed-processing
//! simulation.
//!
//! Images become graphs through [`builders`]; graphs are characterized by
//! [`measurements`], segmented by [`segmentation`], scored for saliency by
//! [`saliency`] and summarized as texture descriptors by [`texture`].
//! [`topo_sim`] generates processor interconnection topologies and simulates
//! a frame stream over them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builders;
pub mod edgelist;
mod error;
pub mod graph;
pub mod image;
pub mod measurements;
pub mod rng;
pub mod saliency;
pub mod segmentation;
pub mod texture;
pub mod topo_sim;

pub use error::{Error, Result};
pub use graph::{NodeId, Point2, SpatialGraph};
pub use image::GrayImage;
