use super::BinaryMask;
use crate::error::{Error, Result};

/// Square structuring element anchored at its center cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    side: usize,
    bits: Vec<bool>,
}

impl StructuringElement {
    pub fn new(side: usize, bits: Vec<bool>) -> Result<Self> {
        if side % 2 == 0 {
            return Err(Error::InvalidParameter(format!("structuring element side {side} is not odd")));
        }
        if bits.len() != side * side || !bits.iter().any(|&b| b) {
            return Err(Error::InvalidParameter(
                "structuring element needs side*side cells with at least one set".into(),
            ));
        }
        Ok(Self { side, bits })
    }

    /// Solid `side x side` square.
    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, vec![true; side * side])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Offsets `(dx, dy)` of the set cells relative to the anchor.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let half = (self.side / 2) as isize;
        (0..self.bits.len())
            .filter(|&i| self.bits[i])
            .map(|i| ((i % self.side) as isize - half, (i / self.side) as isize - half))
            .collect()
    }

    /// Point reflection through the anchor.
    pub fn reflected(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.reverse();
        Self { side: self.side, bits }
    }
}

/// Output pixel is set iff the element, anchored there, lies entirely on
/// foreground. Cells outside the canvas count as background.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let offsets = se.offsets();
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        offsets
            .iter()
            .all(|&(dx, dy)| mask.get_or_bg(x as isize + dx, y as isize + dy))
    })
}

/// Minkowski dilation: output pixel set iff some element cell, placed on a
/// foreground pixel, reaches it.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let offsets = se.offsets();
    let mut out = BinaryMask::empty(mask.width(), mask.height());
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    for (x, y) in mask.foreground() {
        for &(dx, dy) in &offsets {
            let (tx, ty) = (x as isize + dx, y as isize + dy);
            if tx >= 0 && ty >= 0 && tx < w && ty < h {
                out.set(tx as usize, ty as usize, true);
            }
        }
    }
    out
}

/// Erosion followed by dilation with the same element; removes foreground
/// features the element cannot fit inside.
pub fn open(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    dilate(&erode(mask, se), se)
}
