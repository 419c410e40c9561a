//! Linear soft-margin SVM over interpolation features, plus the confusion
//! matrix and the derived percentages used to report results.
//!
//! Training standardizes each feature, then minimizes
//! `lambda/2 |w|^2 + 1/n sum max(0, 1 - y (w.z + b))` by subgradient steps of
//! size `1/(lambda t)` over the samples in their given order. The bias rides
//! along as a constant feature. The iterate with the lowest objective at the
//! end of an epoch is kept, so the result is a pure function of the inputs.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Benign,
    Malignant,
}

impl Label {
    fn sign(self) -> f64 {
        match self {
            Label::Benign => -1.0,
            Label::Malignant => 1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Benign => "Benign",
            Label::Malignant => "Malignant",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Benign" | "benign" | "B" => Ok(Label::Benign),
            "Malignant" | "malignant" | "M" => Ok(Label::Malignant),
            other => Err(Error::InvalidParameter(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: Label,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        Self { features, label }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub regularization: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self { regularization: 0.01, epochs: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub feature_means: Vec<f64>,
    pub feature_scales: Vec<f64>,
    pub trained_on: usize,
}

impl LinearModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.feature_means.iter().zip(&self.feature_scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Raw decision value `w . standardize(x) + b`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: x.len() });
        }
        Ok(dot(&self.weights, &self.standardize(x)) + self.bias)
    }

    /// Malignant iff the score is strictly positive.
    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        let s = self.score(x)?;
        Ok((if s > 0.0 { Label::Malignant } else { Label::Benign }, s))
    }

    /// Decision threshold on the raw axis of a one-feature model.
    pub fn threshold_1d(&self) -> Option<f64> {
        if self.dimension() != 1 || self.weights[0] == 0.0 {
            return None;
        }
        Some(self.feature_means[0] - self.bias * self.feature_scales[0] / self.weights[0])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train_svm(samples: &[Sample], params: &TrainParams) -> Result<LinearModel> {
    let lambda = params.regularization;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("regularization {lambda} must be positive")));
    }
    if params.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be at least 1".into()));
    }
    let Some(first) = samples.first() else {
        return Err(Error::SingleClass);
    };
    let dim = first.features.len();
    if dim == 0 {
        return Err(Error::InvalidParameter("samples have no features".into()));
    }
    for s in samples {
        if s.features.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: s.features.len() });
        }
        if s.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite feature value".into()));
        }
    }
    if !(samples.iter().any(|s| s.label == Label::Benign) && samples.iter().any(|s| s.label == Label::Malignant)) {
        return Err(Error::SingleClass);
    }

    let n = samples.len() as f64;
    let means: Vec<f64> = (0..dim).map(|j| samples.iter().map(|s| s.features[j]).sum::<f64>() / n).collect();
    let scales: Vec<f64> = (0..dim)
        .map(|j| {
            let var = samples.iter().map(|s| (s.features[j] - means[j]).powi(2)).sum::<f64>() / n;
            if var > 0.0 { var.sqrt() } else { 1.0 }
        })
        .collect();
    // standardized features with a trailing constant for the bias
    let data: Vec<(Vec<f64>, f64)> = samples
        .iter()
        .map(|s| {
            let mut z: Vec<f64> = s.features.iter().zip(means.iter().zip(&scales)).map(|(v, (m, sc))| (v - m) / sc).collect();
            z.push(1.0);
            (z, s.label.sign())
        })
        .collect();

    let objective = |w: &[f64]| {
        let hinge: f64 = data.iter().map(|(z, y)| (1.0 - y * dot(w, z)).max(0.0)).sum::<f64>() / n;
        0.5 * lambda * dot(w, w) + hinge
    };

    let radius = 1.0 / lambda.sqrt();
    let mut w = vec![0.0; dim + 1];
    let mut best = (objective(&w), w.clone());
    let mut t = 0u64;
    for _ in 0..params.epochs {
        for (z, y) in &data {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let violated = y * dot(&w, z) < 1.0;
            let shrink = 1.0 - eta * lambda;
            for (wi, zi) in w.iter_mut().zip(z) {
                *wi *= shrink;
                if violated {
                    *wi += eta * y * zi;
                }
            }
            let norm = dot(&w, &w).sqrt();
            if norm > radius {
                w.iter_mut().for_each(|wi| *wi *= radius / norm);
            }
        }
        let obj = objective(&w);
        if obj < best.0 {
            best = (obj, w.clone());
        }
    }
    let mut w = best.1;
    let bias = w.pop().expect("bias slot");
    Ok(LinearModel { weights: w, bias, feature_means: means, feature_scales: scales, trained_on: samples.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Counts with Malignant as the positive class.
pub fn confusion_matrix(predictions: &[Label], truth: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch(predictions.len(), truth.len()));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidParameter("no predictions".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (p, t) in predictions.iter().zip(truth) {
        match (p, t) {
            (Label::Malignant, Label::Malignant) => cm.tp += 1,
            (Label::Malignant, Label::Benign) => cm.fp += 1,
            (Label::Benign, Label::Benign) => cm.tn += 1,
            (Label::Benign, Label::Malignant) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Percentages; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
}

fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Metrics {
    Metrics {
        sensitivity: percent(cm.tp, cm.tp + cm.fn_),
        specificity: percent(cm.tn, cm.tn + cm.fp),
        accuracy: percent(cm.tp + cm.tn, cm.total()),
        precision: percent(cm.tp, cm.tp + cm.fp),
    }
}

impl Metrics {
    /// Aligned text table: counts followed by the four percentages.
    pub fn table(&self, cm: &ConfusionMatrix, scheme: &str) -> String {
        let cell = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.2}"));
        let header = ["Scheme", "TN", "TP", "FP", "FN", "Sensitivity (%)", "Specificity (%)", "Accuracy (%)", "Precision (%)"];
        let row = [
            scheme.to_string(),
            cm.tn.to_string(),
            cm.tp.to_string(),
            cm.fp.to_string(),
            cm.fn_.to_string(),
            cell(self.sensitivity),
            cell(self.specificity),
            cell(self.accuracy),
            cell(self.precision),
        ];
        let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        format!("{}\n{}\n", line(header.to_vec()), line(row.iter().map(String::as_str).collect()))
    }
}

/// Train and test indices, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub seed: u64,
    pub test_fraction: f64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded split keeping the test share close to `test_fraction` within each
/// class. Every class with at least two members contributes to both sides.
pub fn stratified_split(labels: &[Label], test_fraction: f64, seed: u64) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("test fraction {test_fraction} must lie in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [Label::Benign, Label::Malignant] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let n = idx.len();
        let n_test = if n < 2 { 0 } else { ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1) };
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { seed, test_fraction, train, test })
}
