//! Synthetic masses with closed-form geometry.
//!
//! Every shape is star-shaped around its center with boundary radius
//! `r(theta)`: constant for disks, the polar ellipse for ellipses and
//! `R (1 + a cos(k (theta - rotation)))` for lobular and spiculated masses.
//! Optional radial noise is a seeded sum of low-order harmonics, so masks stay
//! single components.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::Label;
use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage};
use crate::signature::{polar_angle, Centroid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeKind {
    Disk,
    Ellipse,
    Lobular,
    Spiculated,
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Disk => "disk",
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Lobular => "lobular",
            ShapeKind::Spiculated => "spiculated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub base_radius: f64,
    /// Lobe count `k` (lobular and spiculated).
    pub lobes: u32,
    /// Relative lobe amplitude `a` in `[0, 1)`.
    pub amplitude: f64,
    /// Minor over major axis (ellipse).
    pub axis_ratio: f64,
    pub rotation: f64,
    /// Center `(x, y)` in image coordinates.
    pub center: (f64, f64),
    /// Peak radial noise in pixels.
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl ShapeSpec {
    fn base(kind: ShapeKind, base_radius: f64, center: (f64, f64)) -> Self {
        Self {
            kind,
            base_radius,
            lobes: 0,
            amplitude: 0.0,
            axis_ratio: 1.0,
            rotation: 0.0,
            center,
            noise_amplitude: 0.0,
            seed: 0,
        }
    }

    pub fn disk(base_radius: f64, center: (f64, f64)) -> Self {
        Self::base(ShapeKind::Disk, base_radius, center)
    }

    pub fn ellipse(base_radius: f64, axis_ratio: f64, rotation: f64, center: (f64, f64)) -> Self {
        Self { axis_ratio, rotation, ..Self::base(ShapeKind::Ellipse, base_radius, center) }
    }

    pub fn lobed(kind: ShapeKind, base_radius: f64, lobes: u32, amplitude: f64, center: (f64, f64)) -> Self {
        Self { lobes, amplitude, ..Self::base(kind, base_radius, center) }
    }

    pub fn with_rotation(self, rotation: f64) -> Self {
        Self { rotation, ..self }
    }

    pub fn with_noise(self, noise_amplitude: f64, seed: u64) -> Self {
        Self { noise_amplitude, seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.base_radius >= 5.0 && self.base_radius.is_finite()) {
            return bad("base radius must be at least 5 px");
        }
        if !(0.0..1.0).contains(&self.amplitude) {
            return bad("amplitude must lie in [0, 1)");
        }
        if matches!(self.kind, ShapeKind::Lobular | ShapeKind::Spiculated) && self.lobes < 2 && self.amplitude > 0.0 {
            return bad("lobed shapes need at least 2 lobes");
        }
        if self.kind == ShapeKind::Ellipse && !(self.axis_ratio > 0.0 && self.axis_ratio <= 1.0) {
            return bad("axis ratio must lie in (0, 1]");
        }
        if self.noise_amplitude < 0.0 || self.noise_amplitude >= self.min_radius() {
            return bad("noise must be nonnegative and below the smallest radius");
        }
        Ok(())
    }

    fn min_radius(&self) -> f64 {
        match self.kind {
            ShapeKind::Disk => self.base_radius,
            ShapeKind::Ellipse => self.base_radius * self.axis_ratio,
            _ => self.base_radius * (1.0 - self.amplitude),
        }
    }

    /// Largest boundary radius including noise.
    pub fn max_radius(&self) -> f64 {
        let r = match self.kind {
            ShapeKind::Disk | ShapeKind::Ellipse => self.base_radius,
            _ => self.base_radius * (1.0 + self.amplitude),
        };
        r + self.noise_amplitude
    }

    /// Noise-free boundary radius at polar angle `theta`.
    pub fn radius_at(&self, theta: f64) -> f64 {
        let phi = theta - self.rotation;
        match self.kind {
            ShapeKind::Disk => self.base_radius,
            ShapeKind::Ellipse => {
                let (a, b) = (self.base_radius, self.base_radius * self.axis_ratio);
                a * b / ((b * phi.cos()).powi(2) + (a * phi.sin()).powi(2)).sqrt()
            }
            ShapeKind::Lobular | ShapeKind::Spiculated => {
                self.base_radius * (1.0 + self.amplitude * (self.lobes as f64 * phi).cos())
            }
        }
    }

    /// Enclosed area of the noise-free shape, `1/2 * integral of r^2`.
    pub fn analytic_area(&self) -> f64 {
        let r = self.base_radius;
        match self.kind {
            ShapeKind::Disk => PI * r * r,
            ShapeKind::Ellipse => PI * r * r * self.axis_ratio,
            _ => PI * r * r * (1.0 + self.amplitude * self.amplitude / 2.0),
        }
    }
}

/// Smooth periodic noise with peak magnitude at most `amplitude`.
struct RadialNoise {
    terms: Vec<(f64, f64, f64)>,
}

impl RadialNoise {
    const HARMONICS: u32 = 6;

    fn new(amplitude: f64, seed: u64) -> Self {
        if amplitude == 0.0 {
            return Self { terms: Vec::new() };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms: Vec<(f64, f64, f64)> = (1..=Self::HARMONICS)
            .map(|h| (h as f64 + 2.0, rng.gen_range(0.2..1.0), rng.gen_range(0.0..TAU)))
            .collect();
        let total: f64 = terms.iter().map(|t| t.1).sum();
        for t in &mut terms {
            t.1 *= amplitude / total;
        }
        Self { terms }
    }

    fn at(&self, theta: f64) -> f64 {
        self.terms.iter().map(|(f, a, p)| a * (f * theta + p).sin()).sum()
    }
}

/// Rasterizes the shape: a pixel is foreground iff its distance from the
/// center is at most `r(theta)` plus noise.
pub fn generate_shape(spec: &ShapeSpec, width: usize, height: usize) -> Result<BinaryMask> {
    spec.validate()?;
    let (cx, cy) = spec.center;
    let m = spec.max_radius();
    if cx - m < 0.0 || cy - m < 0.0 || cx + m > (width as f64 - 1.0) || cy + m > (height as f64 - 1.0) {
        return Err(Error::ShapeOutOfCanvas { width, height });
    }
    let noise = RadialNoise::new(spec.noise_amplitude, spec.seed);
    let c = Centroid::new(cy, cx);
    Ok(BinaryMask::from_fn(width, height, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let d = dx.hypot(dy);
        if d == 0.0 {
            return true;
        }
        if d > m {
            return false;
        }
        let theta = polar_angle(x as f64, y as f64, &c);
        d <= spec.radius_at(theta) + noise.at(theta)
    }))
}

/// A generated mask with its proxy label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledShape {
    pub name: String,
    pub spec: ShapeSpec,
    pub label: Label,
    pub mask: BinaryMask,
}

/// Canvas side used by [`generate_corpus`].
pub const CORPUS_CANVAS: usize = 160;

/// `n_per_class` benign proxies (disks, ellipses, lobular with `a <= 0.1`)
/// and as many malignant proxies (spiculated, `a` in `[0.3, 0.6]`, `k` in
/// `[5, 12]`), fully determined by `seed`. Benign and malignant shapes
/// alternate.
pub fn generate_corpus(n_per_class: usize, seed: u64) -> Result<Vec<LabeledShape>> {
    if n_per_class == 0 {
        return Err(Error::InvalidParameter("n_per_class must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = CORPUS_CANVAS as f64 / 2.0;
    let mut out = Vec::with_capacity(2 * n_per_class);
    for i in 0..n_per_class {
        let center = (c + rng.gen_range(-4.0..4.0), c + rng.gen_range(-4.0..4.0));
        let rotation = rng.gen_range(0.0..TAU);
        let noise_seed = rng.gen();
        let benign = match i % 3 {
            0 => ShapeSpec::disk(rng.gen_range(20.0..45.0), center),
            1 => ShapeSpec::ellipse(rng.gen_range(25.0..50.0), rng.gen_range(0.6..0.95), rotation, center),
            _ => ShapeSpec::lobed(
                ShapeKind::Lobular,
                rng.gen_range(20.0..45.0),
                rng.gen_range(3..=6),
                rng.gen_range(0.03..=0.1),
                center,
            )
            .with_rotation(rotation),
        }
        .with_noise(0.5, noise_seed);
        out.push(labeled(format!("benign_{i:03}"), benign, Label::Benign)?);

        let center = (c + rng.gen_range(-4.0..4.0), c + rng.gen_range(-4.0..4.0));
        let malignant = ShapeSpec::lobed(
            ShapeKind::Spiculated,
            rng.gen_range(20.0..40.0),
            rng.gen_range(5..=12),
            rng.gen_range(0.3..=0.6),
            center,
        )
        .with_rotation(rng.gen_range(0.0..TAU))
        .with_noise(0.5, rng.gen());
        out.push(labeled(format!("malignant_{i:03}"), malignant, Label::Malignant)?);
    }
    Ok(out)
}

fn labeled(name: String, spec: ShapeSpec, label: Label) -> Result<LabeledShape> {
    let mask = generate_shape(&spec, CORPUS_CANVAS, CORPUS_CANVAS)?;
    Ok(LabeledShape { name, spec, label, mask })
}

/// Grayscale rendering of a mask as a bright mass on a darker, textured
/// background, for exercising the thresholding front end.
pub fn render_mammogram_like(mask: &BinaryMask, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RasterImage::from_fn(mask.width(), mask.height(), |x, y| {
        let jitter: i32 = rng.gen_range(-12..=12);
        let base = if mask.get(x, y) { 190 } else { 60 + ((x / 64 + y / 64) % 3) as i32 * 8 };
        (base + jitter).clamp(0, 255) as u8
    })
    .expect("mask canvas is nonempty")
}
