//! Pixel grids and the binary image operations that isolate a tumor region.
//!
//! Coordinates follow the image convention used across the crate: `x` is the
//! column index growing rightward, `y` the row index growing downward, origin
//! at the top-left pixel.

mod edges;
mod label;
mod morphology;
mod pgm;
mod threshold;

pub use edges::sobel_edges;
pub use label::{connected_components, largest_component, LabelMap};
pub use morphology::{dilate, erode, open, StructuringElement};
pub use pgm::{read_pgm, write_pgm};
pub use threshold::{otsu_threshold, threshold_otsu, Binarization};

use crate::error::{Error, Result};

/// 8-bit grayscale image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: usize,
    height: usize,
    luminance: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, luminance: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || luminance.len() != width * height {
            return Err(Error::Dimensions { width, height, len: luminance.len() });
        }
        Ok(Self { width, height, luminance })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut luminance = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                luminance.push(f(x, y));
            }
        }
        Self::new(width, height, luminance)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.luminance
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.luminance[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.luminance[y * self.width + x] = value;
    }

    /// Copies the rectangle `[x0, x0 + w) x [y0, y0 + h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        Self::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// Row-major boolean grid; `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::Dimensions { width, height, len: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    /// Foreground wherever the image is nonzero.
    pub fn from_image(img: &RasterImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            bits: img.pixels().iter().map(|&v| v != 0).collect(),
        }
    }

    /// Foreground as 255, background as 0.
    pub fn to_image(&self) -> RasterImage {
        let luminance = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        RasterImage { width: self.width, height: self.height, luminance }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Signed lookup; anything outside the canvas reads as background.
    #[inline]
    pub fn get_or_bg(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixel coordinates as `(x, y)` in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn same_canvas(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.same_canvas(other) && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Number of pixels set in `self` but not in `other`.
    pub fn count_difference(&self, other: &BinaryMask) -> Result<usize> {
        if !self.same_canvas(other) {
            return Err(Error::CanvasMismatch(self.width, self.height, other.width, other.height));
        }
        Ok(self.bits.iter().zip(&other.bits).filter(|(&a, &b)| a && !b).count())
    }

    /// Places `self` at offset `(x0, y0)` on a blank `width x height` canvas.
    pub fn embed(&self, width: usize, height: usize, x0: usize, y0: usize) -> Result<BinaryMask> {
        if x0 + self.width > width || y0 + self.height > height {
            return Err(Error::InvalidParameter("embedded mask exceeds canvas".into()));
        }
        let mut out = BinaryMask::empty(width, height);
        for (x, y) in self.foreground() {
            out.set(x0 + x, y0 + y, true);
        }
        Ok(out)
    }
}

/// The eight neighbor offsets `(dx, dy)`, clockwise on screen starting west.
pub(crate) const NEIGHBORS_CW: [(isize, isize); 8] =
    [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];
