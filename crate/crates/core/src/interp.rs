//! Gap-pixel counting between the tumor region and its enclosing circle.
//!
//! The interpolated pixels are the ones the circle covers but the tumor does
//! not: what has to be added to round the boundary out to the circle. Tumor
//! pixels outside the circle are counted separately as protrusions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygeom::Circle;
use crate::raster::{BinaryMask, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationResult {
    /// |disk \ tumor|
    pub fill_count: usize,
    /// |tumor \ disk|
    pub protrusion_count: usize,
    pub symmetric_diff: usize,
    /// `fill_count` over the tumor area.
    pub fill_ratio: f64,
    pub circle: Circle,
}

/// Pixels whose centers lie within the closed circle, clipped to the canvas.
pub fn rasterize_disk(circle: &Circle, width: usize, height: usize) -> BinaryMask {
    let mut out = BinaryMask::empty(width, height);
    let (cx, cy, r) = (circle.center.x, circle.center.y, circle.radius);
    let r2 = r * r;
    let y_lo = (cy - r).floor().max(0.0) as usize;
    let y_hi = ((cy + r).ceil().max(-1.0) as isize).min(height as isize - 1);
    let x_lo = (cx - r).floor().max(0.0) as usize;
    let x_hi = ((cx + r).ceil().max(-1.0) as isize).min(width as isize - 1);
    if y_hi < 0 || x_hi < 0 {
        return out;
    }
    for y in y_lo..=y_hi as usize {
        let dy = y as f64 - cy;
        for x in x_lo..=x_hi as usize {
            let dx = x as f64 - cx;
            if dx * dx + dy * dy <= r2 {
                out.set(x, y, true);
            }
        }
    }
    out
}

pub fn count_interpolated_pixels(tumor: &BinaryMask, circle: &Circle) -> Result<InterpolationResult> {
    let area = tumor.count();
    if area == 0 {
        return Err(Error::EmptyRegion);
    }
    let disk = rasterize_disk(circle, tumor.width(), tumor.height());
    let fill_count = disk.count_difference(tumor)?;
    let protrusion_count = tumor.count_difference(&disk)?;
    Ok(InterpolationResult {
        fill_count,
        protrusion_count,
        symmetric_diff: fill_count + protrusion_count,
        fill_ratio: fill_count as f64 / area as f64,
        circle: *circle,
    })
}

pub const OVERLAY_TUMOR: u8 = 128;
pub const OVERLAY_FILL: u8 = 255;
pub const OVERLAY_PROTRUSION: u8 = 64;
pub const OVERLAY_EDGE: u8 = 192;

/// Overlay image: tumor inside the circle in mid-gray, fill pixels white,
/// protrusions dark gray, optional edge ring light gray, background black.
pub fn render_overlay(tumor: &BinaryMask, circle: &Circle, edges: Option<&BinaryMask>) -> RasterImage {
    let disk = rasterize_disk(circle, tumor.width(), tumor.height());
    RasterImage::from_fn(tumor.width(), tumor.height(), |x, y| {
        let (t, d) = (tumor.get(x, y), disk.get(x, y));
        match (t, d) {
            (true, _) if edges.is_some_and(|e| e.get(x, y)) => OVERLAY_EDGE,
            (true, true) => OVERLAY_TUMOR,
            (true, false) => OVERLAY_PROTRUSION,
            (false, true) => OVERLAY_FILL,
            (false, false) => 0,
        }
    })
    .expect("tumor canvas is nonempty")
}
