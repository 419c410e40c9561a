//! End-to-end analysis of one tumor region and the per-image feature record.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifier::{Label, TrainParams};
use crate::dataset::RoiOptions;
use crate::error::{Error, Result};
use crate::features::{compute_features, region_perimeter, GeoFeatures};
use crate::fmt::sig6;
use crate::interp::{count_interpolated_pixels, render_overlay, InterpolationResult};
use crate::polygeom::{
    enclosing_circle, max_vertex_radius, min_enclosing_circle, polygon_centroid, polygon_from_extrema, Circle,
    OverlayGeometry, Point, Polygon,
};
use crate::raster::{sobel_edges, BinaryMask, RasterImage, StructuringElement};
use crate::signature::{
    radial_signature, region_centroid, select_extrema, smooth_signature, trace_boundary, BoundaryChain, Centroid,
    DetectorParams, RadialSignature, SignatureExtrema,
};

/// Which interpolation counts feed the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureMode {
    /// `[fill_count, fill_ratio]`
    #[default]
    Default,
    /// `[fill_count]`
    CountOnly,
    /// `[symmetric_diff, symmetric_diff / area]`
    SymmetricDiff,
}

impl FeatureMode {
    pub fn dimension(&self) -> usize {
        match self {
            FeatureMode::CountOnly => 1,
            _ => 2,
        }
    }
}

/// How the tumor region is located in a full image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DetectMode {
    /// Window around the annotated center.
    #[default]
    Annotation,
    /// Global threshold over the whole image.
    Auto,
}

/// Every tunable of the pipeline. Serialized next to each output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_bins: usize,
    pub smoothing_window: usize,
    pub prominence: f64,
    pub min_separation: usize,
    pub se_side: usize,
    pub min_area: usize,
    pub margin_factor: f64,
    pub regularization: f64,
    pub epochs: usize,
    pub seed: u64,
    pub test_fraction: f64,
    pub feature_mode: FeatureMode,
    pub detect: DetectMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_bins: 360,
            smoothing_window: 5,
            prominence: 2.0,
            min_separation: 5,
            se_side: 3,
            min_area: 50,
            margin_factor: 1.5,
            regularization: 0.01,
            epochs: 200,
            seed: 1,
            test_fraction: 0.3,
            feature_mode: FeatureMode::Default,
            detect: DetectMode::Annotation,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_bins < 8 {
            return bad(format!("n_bins {} < 8", self.n_bins));
        }
        if self.smoothing_window % 2 == 0 || self.smoothing_window >= self.n_bins {
            return bad(format!("smoothing_window {} must be odd and below n_bins", self.smoothing_window));
        }
        if !(self.prominence >= 0.0) {
            return bad(format!("prominence {} must be nonnegative", self.prominence));
        }
        if self.se_side % 2 == 0 {
            return bad(format!("se_side {} must be odd", self.se_side));
        }
        if !(self.margin_factor >= 1.0) {
            return bad(format!("margin_factor {} < 1", self.margin_factor));
        }
        if !(self.regularization > 0.0) || self.epochs == 0 {
            return bad("regularization must be positive and epochs at least 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} must lie in (0, 1)", self.test_fraction));
        }
        Ok(())
    }

    pub fn detector(&self) -> DetectorParams {
        DetectorParams { prominence: self.prominence, min_separation: self.min_separation }
    }

    pub fn roi_options(&self) -> Result<RoiOptions> {
        Ok(RoiOptions {
            margin_factor: self.margin_factor,
            structuring_element: StructuringElement::square(self.se_side)?,
            min_area: self.min_area,
        })
    }

    pub fn train_params(&self) -> TrainParams {
        TrainParams { regularization: self.regularization, epochs: self.epochs, seed: self.seed }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub const FLAG_FALLBACK_EXTREMA: &str = "fallback_extrema";
pub const FLAG_DEGENERATE_POLYGON: &str = "degenerate_polygon";

/// Everything computed for one region.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub chain: BoundaryChain,
    pub region_centroid: Centroid,
    pub signature: RadialSignature,
    pub smoothed: RadialSignature,
    pub extrema: SignatureExtrema,
    pub polygon: Option<Polygon>,
    pub polygon_centroid: Option<Point>,
    /// Largest vertex distance from the polygon centroid.
    pub circumscribed_radius: Option<f64>,
    pub circle: Circle,
    pub features: GeoFeatures,
    pub interpolation: InterpolationResult,
    pub flags: Vec<String>,
}

/// Runs boundary tracing, signature, extrema, polygon, circle, features and
/// gap counting on a filled single-component tumor mask.
pub fn analyze_mask(tumor: &BinaryMask, cfg: &RunConfig) -> Result<Analysis> {
    let chain = trace_boundary(tumor)?;
    let centroid = region_centroid(tumor)?;
    let signature = radial_signature(&chain, centroid, cfg.n_bins)?;
    let smoothed = smooth_signature(&signature, cfg.smoothing_window)?;
    let (extrema, fallback) = select_extrema(&smoothed, cfg.detector());
    let mut flags = Vec::new();
    if fallback {
        flags.push(FLAG_FALLBACK_EXTREMA.to_string());
    }

    let built = polygon_from_extrema(&extrema, &centroid).and_then(|poly| {
        let circle = enclosing_circle(&poly)?;
        let pc = polygon_centroid(&poly)?;
        let rmax = max_vertex_radius(&poly)?;
        Ok((poly, pc, rmax, circle))
    });
    let (polygon, polygon_centroid, circumscribed_radius, circle) = match built {
        Ok((poly, pc, rmax, circle)) => (Some(poly), Some(pc), Some(rmax), circle),
        Err(Error::DegeneratePolygon(_)) | Err(Error::TooFewExtrema { .. }) => {
            flags.push(FLAG_DEGENERATE_POLYGON.to_string());
            let pts: Vec<Point> = chain.points().iter().map(|&(x, y)| Point::new(x as f64, y as f64)).collect();
            (None, None, None, min_enclosing_circle(&pts)?)
        }
        Err(e) => return Err(e),
    };

    let features = compute_features(tumor.count(), region_perimeter(&chain))?;
    let interpolation = count_interpolated_pixels(tumor, &circle)?;
    Ok(Analysis {
        chain,
        region_centroid: centroid,
        signature,
        smoothed,
        extrema,
        polygon,
        polygon_centroid,
        circumscribed_radius,
        circle,
        features,
        interpolation,
        flags,
    })
}

impl Analysis {
    pub fn overlay(&self, tumor: &BinaryMask) -> RasterImage {
        render_overlay(tumor, &self.circle, Some(&sobel_edges(tumor)))
    }

    pub fn overlay_geometry(&self) -> OverlayGeometry {
        OverlayGeometry::new(self.polygon.as_ref(), &self.circle)
    }
}

/// Numeric part of a feature record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurements {
    pub area: usize,
    pub perimeter_weighted: f64,
    pub perimeter_count: usize,
    pub circularity: f64,
    pub roundness: f64,
    pub compactness: f64,
    pub n_extrema: usize,
    pub region_centroid_x: f64,
    pub region_centroid_y: f64,
    pub circle_center_x: f64,
    pub circle_center_y: f64,
    pub circle_radius: f64,
    pub circumscribed_radius: Option<f64>,
    pub fill_count: usize,
    pub protrusion_count: usize,
    pub fill_ratio: f64,
}

/// One CSV row: an analyzed image, or a failed one carrying only its flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub image_id: String,
    pub label: Option<Label>,
    pub measurements: Option<Measurements>,
    pub degenerate_flags: Vec<String>,
}

pub const CSV_HEADER: &str = "image_id,area,perimeter_weighted,perimeter_count,circularity,roundness,compactness,\
n_extrema,region_centroid_x,region_centroid_y,circle_center_x,circle_center_y,circle_radius,circumscribed_radius,\
fill_count,protrusion_count,fill_ratio,label,degenerate_flags";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl FeatureRecord {
    pub fn from_analysis(image_id: impl Into<String>, label: Option<Label>, a: &Analysis) -> Self {
        let f = &a.features;
        let i = &a.interpolation;
        Self {
            image_id: image_id.into(),
            label,
            measurements: Some(Measurements {
                area: f.area,
                perimeter_weighted: f.perimeter,
                perimeter_count: f.perimeter_px,
                circularity: f.circularity,
                roundness: f.roundness,
                compactness: f.compactness,
                n_extrema: a.extrema.len(),
                region_centroid_x: a.region_centroid.col,
                region_centroid_y: a.region_centroid.row,
                circle_center_x: a.circle.center.x,
                circle_center_y: a.circle.center.y,
                circle_radius: a.circle.radius,
                circumscribed_radius: a.circumscribed_radius,
                fill_count: i.fill_count,
                protrusion_count: i.protrusion_count,
                fill_ratio: i.fill_ratio,
            }),
            degenerate_flags: a.flags.clone(),
        }
    }

    /// Row for an image whose analysis failed at `stage`.
    pub fn failed(image_id: impl Into<String>, label: Option<Label>, reason: &str) -> Self {
        Self {
            image_id: image_id.into(),
            label,
            measurements: None,
            degenerate_flags: vec![format!("failed_{reason}")],
        }
    }

    pub fn is_failed(&self) -> bool {
        self.measurements.is_none()
    }

    /// Classifier input for this record, if it was analyzed.
    pub fn feature_vector(&self, mode: FeatureMode) -> Option<Vec<f64>> {
        let m = self.measurements.as_ref()?;
        let sym = (m.fill_count + m.protrusion_count) as f64;
        Some(match mode {
            FeatureMode::Default => vec![m.fill_count as f64, m.fill_ratio],
            FeatureMode::CountOnly => vec![m.fill_count as f64],
            FeatureMode::SymmetricDiff => vec![sym, sym / m.area as f64],
        })
    }

    pub fn csv_row(&self) -> String {
        let mut row = csv_field(&self.image_id);
        match &self.measurements {
            Some(m) => {
                let _ = write!(
                    row,
                    ",{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    m.area,
                    sig6(m.perimeter_weighted),
                    m.perimeter_count,
                    sig6(m.circularity),
                    sig6(m.roundness),
                    sig6(m.compactness),
                    m.n_extrema,
                    sig6(m.region_centroid_x),
                    sig6(m.region_centroid_y),
                    sig6(m.circle_center_x),
                    sig6(m.circle_center_y),
                    sig6(m.circle_radius),
                    m.circumscribed_radius.map(sig6).unwrap_or_default(),
                    m.fill_count,
                    m.protrusion_count,
                    sig6(m.fill_ratio),
                );
            }
            None => row.push_str(&",".repeat(16)),
        }
        let label = self.label.map(|l| l.to_string()).unwrap_or_default();
        let _ = write!(row, ",{},{}", label, csv_field(&self.degenerate_flags.join(";")));
        row
    }
}

/// Header plus one line per record.
pub fn records_to_csv(records: &[FeatureRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
