//! Shape-irregularity analysis for mammographic masses.
//!
//! The pipeline segments a tumor region, describes its border as a radial
//! distance signature around the region centroid, joins the signature maxima
//! into a polygon, builds the mean-radius circle around that polygon and counts
//! the pixels needed to round the tumor out to the circle. That count is the
//! feature fed to a linear max-margin classifier.

pub mod classifier;
pub mod dataset;
mod error;
pub mod fmt;
pub mod features;
pub mod interp;
pub mod pipeline;
pub mod polygeom;
pub mod raster;
pub mod signature;
pub mod synth;

pub use classifier::{ConfusionMatrix, Label, LinearModel, Metrics, Sample, Split};
pub use error::{Error, Result, Stage};
pub use features::GeoFeatures;
pub use interp::InterpolationResult;
pub use pipeline::{Analysis, FeatureMode, FeatureRecord, RunConfig};
pub use polygeom::{Circle, Point, Polygon};
pub use raster::{BinaryMask, LabelMap, RasterImage, StructuringElement};
pub use signature::{BoundaryChain, Centroid, RadialSignature, SignatureExtrema};
