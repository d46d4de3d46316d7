use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Per-pixel Sobel derivatives with magnitude and folded orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
    magnitude: Vec<f64>,
    orientation: Vec<f64>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self, x: usize, y: usize) -> f64 {
        self.gx[y * self.width + x]
    }

    pub fn gy(&self, x: usize, y: usize) -> f64 {
        self.gy[y * self.width + x]
    }

    pub fn magnitude(&self, x: usize, y: usize) -> f64 {
        self.magnitude[y * self.width + x]
    }

    pub(crate) fn magnitude_at(&self, index: usize) -> f64 {
        self.magnitude[index]
    }

    /// Gradient (normal) direction folded into `[0, pi)`; 0 where the
    /// magnitude vanishes.
    pub fn orientation(&self, x: usize, y: usize) -> f64 {
        self.orientation[y * self.width + x]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

/// Folds an angle into `[0, pi)`.
pub(crate) fn fold_orientation(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// 3x3 Sobel gradient with replicate padding. `x` grows rightwards and `y`
/// downwards.
pub fn estimate_gradient(img: &GrayImage) -> Result<GradientField> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    let px = |x: isize, y: isize| -> f64 {
        let xx = x.clamp(0, w as isize - 1) as usize;
        let yy = y.clamp(0, h as isize - 1) as usize;
        f64::from(img.get(xx, yy))
    };
    let n = w * h;
    let mut field = GradientField {
        width: w,
        height: h,
        gx: Vec::with_capacity(n),
        gy: Vec::with_capacity(n),
        magnitude: Vec::with_capacity(n),
        orientation: Vec::with_capacity(n),
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            let gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            let magnitude = gx.hypot(gy);
            let orientation = if magnitude > 0.0 {
                fold_orientation(gy.atan2(gx))
            } else {
                0.0
            };
            field.gx.push(gx);
            field.gy.push(gy);
            field.magnitude.push(magnitude);
            field.orientation.push(orientation);
        }
    }
    Ok(field)
}

/// A high-contrast pixel: position, normal orientation and gradient magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePixel {
    pub x: usize,
    pub y: usize,
    pub orientation: f64,
    pub magnitude: f64,
}

/// High-contrast pixels in scan-line order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePixelSet {
    width: usize,
    height: usize,
    pixels: Vec<EdgePixel>,
}

impl EdgePixelSet {
    /// Builds a set from explicit pixels; coordinates must be unique and in
    /// bounds. Pixels are sorted into scan-line order.
    pub fn new(width: usize, height: usize, mut pixels: Vec<EdgePixel>) -> Result<Self> {
        for p in &pixels {
            if p.x >= width || p.y >= height {
                return Err(Error::PixelOutOfBounds {
                    x: p.x,
                    y: p.y,
                    width,
                    height,
                });
            }
        }
        pixels.sort_by_key(|p| (p.y, p.x));
        if let Some(dup) = pixels
            .windows(2)
            .find(|w| (w[0].x, w[0].y) == (w[1].x, w[1].y))
        {
            return Err(Error::InvalidParameter(format!(
                "edge pixel ({}, {}) listed twice",
                dup[0].x, dup[0].y
            )));
        }
        Ok(EdgePixelSet {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[EdgePixel] {
        &self.pixels
    }
}

/// Keeps pixels whose magnitude reaches `contrast_fraction` of the maximum.
/// A field without any gradient yields the empty set.
pub fn select_edge_pixels(field: &GradientField, contrast_fraction: f64) -> Result<EdgePixelSet> {
    if !(contrast_fraction > 0.0 && contrast_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "contrast fraction {contrast_fraction} outside (0, 1]"
        )));
    }
    let max = field.max_magnitude();
    let mut pixels = Vec::new();
    if max > 0.0 {
        let threshold = contrast_fraction * max;
        for y in 0..field.height {
            for x in 0..field.width {
                let magnitude = field.magnitude(x, y);
                if magnitude >= threshold {
                    pixels.push(EdgePixel {
                        x,
                        y,
                        orientation: field.orientation(x, y),
                        magnitude,
                    });
                }
            }
        }
    }
    Ok(EdgePixelSet {
        width: field.width,
        height: field.height,
        pixels,
    })
}
