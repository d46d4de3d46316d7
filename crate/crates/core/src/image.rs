//! Grayscale raster images and Netpbm (PGM/PPM) IO.

use std::io::Write;

use crate::error::{Error, Result};

/// 8-bit grayscale image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if samples.len() != width * height {
            return Err(Error::SampleCount {
                expected: width * height,
                actual: samples.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples)
    }

    /// Converts RGB triples to gray with luminance weights 0.299/0.587/0.114.
    pub fn from_rgb(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != 3 * width * height {
            return Err(Error::SampleCount {
                expected: 3 * width * height,
                actual: rgb.len(),
            });
        }
        let samples = rgb
            .chunks_exact(3)
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect();
        Self::new(width, height, samples)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn transpose(&self) -> GrayImage {
        GrayImage::from_fn(self.height, self.width, |x, y| self.get(y, x))
            .expect("same sample count")
    }
}

pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

/// Writes an ASCII (P2) PGM, one image row per line.
pub fn write_pgm<W: Write>(img: &GrayImage, mut out: W) -> Result<()> {
    writeln!(out, "P2\n{} {}\n255", img.width, img.height)?;
    for row in img.samples.chunks(img.width) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(if start >= self.bytes.len() {
                format!("truncated data: missing {what} at byte offset {start}")
            } else {
                format!("expected {what} at byte offset {start}")
            }));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("{what} out of range at byte offset {start}")))
    }
}

/// Parses a PGM (P2/P5) or PPM (P3/P6) image with maxval up to 255.
///
/// Samples with maxval below 255 are rescaled linearly to `[0, 255]`; color
/// images are converted to luminance.
pub fn decode_pnm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::Parse("missing Netpbm magic number".into()));
    }
    let (binary, channels) = match bytes[1] {
        b'2' => (false, 1),
        b'5' => (true, 1),
        b'3' => (false, 3),
        b'6' => (true, 3),
        other => {
            return Err(Error::Parse(format!(
                "unsupported magic number P{}",
                char::from(other)
            )))
        }
    };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.next_uint("width")?;
    let height = cur.next_uint("height")?;
    let maxval = cur.next_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!("maxval {maxval} outside 1..=255")));
    }
    let count = width * height * channels;

    let raw: Vec<u8> = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::Parse(format!(
                "truncated raster: expected whitespace at byte offset {}",
                cur.pos
            )));
        }
        let start = cur.pos + 1;
        let available = bytes.len() - start;
        if available < count {
            return Err(Error::Parse(format!(
                "truncated raster: expected {count} bytes from byte offset {start}, found {available} (ends at byte offset {})",
                bytes.len()
            )));
        }
        bytes[start..start + count].to_vec()
    } else {
        let mut raw = Vec::with_capacity(count);
        for _ in 0..count {
            let v = cur.next_uint("sample")?;
            if v > maxval {
                return Err(Error::Parse(format!(
                    "sample {v} exceeds maxval {maxval} before byte offset {}",
                    cur.pos
                )));
            }
            raw.push(v as u8);
        }
        raw
    };

    let mut raw = raw;
    if binary {
        if let Some(bad) = raw.iter().position(|&v| usize::from(v) > maxval) {
            return Err(Error::Parse(format!(
                "sample exceeds maxval {maxval} in raster element {bad}"
            )));
        }
    }
    if maxval != 255 {
        for v in &mut raw {
            *v = (f64::from(*v) * 255.0 / maxval as f64).round() as u8;
        }
    }
    if channels == 3 {
        GrayImage::from_rgb(width, height, &raw)
    } else {
        GrayImage::new(width, height, raw)
    }
}

pub fn read_image(path: impl AsRef<std::path::Path>) -> Result<GrayImage> {
    let bytes = std::fs::read(path)?;
    decode_pnm(&bytes)
}
