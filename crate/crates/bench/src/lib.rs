//! Synthetic inputs shared by the benchmarks.

use spatialnet_core::GrayImage;

/// Two-region image: left half at `low`, right half at `high`.
pub fn two_region(size: usize, low: u8, high: u8) -> GrayImage {
    GrayImage::from_fn(size, size, |x, _| if x < size / 2 { low } else { high }).expect("non-empty")
}

/// One-pixel-wide bright cross on a dark background.
pub fn plus_sign(size: usize) -> GrayImage {
    let mid = size / 2;
    GrayImage::from_fn(
        size,
        size,
        |x, y| if x == mid || y == mid { 255 } else { 0 },
    )
    .expect("non-empty")
}

/// Gray-level ramp with a deterministic ripple, for similarity networks.
pub fn textured(size: usize) -> GrayImage {
    GrayImage::from_fn(size, size, |x, y| {
        ((x * 7 + y * 3 + (x * y) % 11) % 256) as u8
    })
    .expect("non-empty")
}
