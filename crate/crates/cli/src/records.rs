//! Reading feature CSVs and prediction files back in.

use std::path::Path;

use massround::pipeline::{FeatureRecord, Measurements};
use massround::Label;
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Deserialize)]
struct Row {
    image_id: String,
    area: Option<usize>,
    perimeter_weighted: Option<f64>,
    perimeter_count: Option<usize>,
    circularity: Option<f64>,
    roundness: Option<f64>,
    compactness: Option<f64>,
    n_extrema: Option<usize>,
    region_centroid_x: Option<f64>,
    region_centroid_y: Option<f64>,
    circle_center_x: Option<f64>,
    circle_center_y: Option<f64>,
    circle_radius: Option<f64>,
    circumscribed_radius: Option<f64>,
    fill_count: Option<usize>,
    protrusion_count: Option<usize>,
    fill_ratio: Option<f64>,
    label: Option<String>,
    degenerate_flags: Option<String>,
}

fn parse_label(s: &str, line: usize) -> CliResult<Label> {
    s.parse().map_err(|_| CliError::input(format!("line {line}: unknown label {s:?}")))
}

impl Row {
    fn into_record(self, line: usize) -> CliResult<FeatureRecord> {
        let label = match self.label.as_deref() {
            None | Some("") => None,
            Some(s) => Some(parse_label(s, line)?),
        };
        let degenerate_flags = self
            .degenerate_flags
            .unwrap_or_default()
            .split(';')
            .filter(|f| !f.is_empty())
            .map(String::from)
            .collect();
        let measurements = match (self.area, self.fill_count, self.protrusion_count, self.fill_ratio) {
            (Some(area), Some(fill_count), Some(protrusion_count), Some(fill_ratio)) => Some(Measurements {
                area,
                perimeter_weighted: self.perimeter_weighted.unwrap_or(f64::NAN),
                perimeter_count: self.perimeter_count.unwrap_or(0),
                circularity: self.circularity.unwrap_or(f64::NAN),
                roundness: self.roundness.unwrap_or(f64::NAN),
                compactness: self.compactness.unwrap_or(f64::NAN),
                n_extrema: self.n_extrema.unwrap_or(0),
                region_centroid_x: self.region_centroid_x.unwrap_or(f64::NAN),
                region_centroid_y: self.region_centroid_y.unwrap_or(f64::NAN),
                circle_center_x: self.circle_center_x.unwrap_or(f64::NAN),
                circle_center_y: self.circle_center_y.unwrap_or(f64::NAN),
                circle_radius: self.circle_radius.unwrap_or(f64::NAN),
                circumscribed_radius: self.circumscribed_radius,
                fill_count,
                protrusion_count,
                fill_ratio,
            }),
            _ => None,
        };
        Ok(FeatureRecord { image_id: self.image_id, label, measurements, degenerate_flags })
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Parses a CSV written by `analyze` or `batch`.
pub fn parse_feature_csv(text: &str) -> CliResult<Vec<FeatureRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| CliError::input(format!("feature csv: {e}")))?;
        out.push(row.into_record(i + 2)?);
    }
    Ok(out)
}

pub fn read_feature_csv(path: &Path) -> CliResult<Vec<FeatureRecord>> {
    parse_feature_csv(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))
}

#[derive(Debug, Deserialize)]
struct PredictionRow {
    prediction: String,
    truth: String,
}

/// `(predictions, truth)` from a CSV with `prediction` and `truth` columns.
pub fn read_predictions(path: &Path) -> CliResult<(Vec<Label>, Vec<Label>)> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut pred, mut truth) = (Vec::new(), Vec::new());
    for (i, row) in reader.deserialize::<PredictionRow>().enumerate() {
        let row = row.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        pred.push(parse_label(&row.prediction, i + 2)?);
        truth.push(parse_label(&row.truth, i + 2)?);
    }
    if pred.is_empty() {
        return Err(CliError::input(format!("{}: no prediction rows", path.display())));
    }
    Ok((pred, truth))
}
