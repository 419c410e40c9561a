//! Geometric descriptors of the segmented region.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryMask;
use crate::signature::BoundaryChain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoFeatures {
    pub area: usize,
    /// Chain length with unit axial and sqrt(2) diagonal steps.
    pub perimeter: f64,
    /// Number of boundary pixels.
    pub perimeter_px: usize,
    pub circularity: f64,
    pub roundness: f64,
    pub compactness: f64,
}

/// Boundary length in both forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perimeter {
    pub length: f64,
    pub count: usize,
}

pub fn region_area(mask: &BinaryMask) -> usize {
    mask.count()
}

pub fn region_perimeter(chain: &BoundaryChain) -> Perimeter {
    let pts = chain.points();
    let n = pts.len();
    let length = if n < 2 {
        0.0
    } else {
        (0..n)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                if a.0 != b.0 && a.1 != b.1 { std::f64::consts::SQRT_2 } else { 1.0 }
            })
            .sum()
    };
    Perimeter { length, count: n }
}

/// Circularity `4 pi A / P^2` on the weighted perimeter. Roundness uses the
/// same expression and compactness is its square root.
pub fn compute_features(area: usize, perimeter: Perimeter) -> Result<GeoFeatures> {
    if area == 0 || !(perimeter.length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "features need positive area and perimeter, got {area} and {}",
            perimeter.length
        )));
    }
    let circularity = 4.0 * PI * area as f64 / (perimeter.length * perimeter.length);
    let roundness = circularity;
    Ok(GeoFeatures {
        area,
        perimeter: perimeter.length,
        perimeter_px: perimeter.count,
        circularity,
        roundness,
        compactness: roundness.sqrt(),
    })
}

/// Circularity from real-valued area and perimeter, for analytic shapes.
pub fn circularity(area: f64, perimeter: f64) -> f64 {
    4.0 * PI * area / (perimeter * perimeter)
}
