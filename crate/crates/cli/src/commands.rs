use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use massround::classifier::{compute_metrics, confusion_matrix, stratified_split, train_svm};
use massround::dataset::{extract_roi, parse_mias_info, Abnormality, Annotation, MiasRecord, Tissue};
use massround::fmt::sig6;
use massround::pipeline::{analyze_mask, records_to_csv, DetectMode, FeatureMode};
use massround::raster::{read_pgm, write_pgm};
use massround::synth::{generate_corpus, render_mammogram_like, CORPUS_CANVAS};
use massround::{
    Analysis, BinaryMask, ConfusionMatrix, FeatureRecord, Label, LinearModel, Metrics, RasterImage, RunConfig, Sample,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::records::{read_feature_csv, read_predictions};
use crate::{AnalyzeArgs, BatchArgs, CliError, CliResult, EvalArgs, RenderArgs, SynthArgs, TrainArgs};

pub const MODEL_FORMAT_VERSION: u32 = 1;
/// Side of the images written by `synth --mias`.
pub const MIAS_SIDE: usize = 1024;

/// `<file>.config.json` next to an output file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".config.json");
    path.with_file_name(name)
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::output(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::output(path, e))
}

fn write_with_config(path: &Path, bytes: impl AsRef<[u8]>, cfg: &RunConfig) -> CliResult<()> {
    write_file(path, bytes)?;
    write_file(&sidecar_path(path), cfg.to_json())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn load_image(path: &Path) -> CliResult<RasterImage> {
    let bytes = fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    read_pgm(&bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Lesion mask: the annotated window when an ROI is given in annotation
/// mode, otherwise the largest region of the whole image.
fn detect(img: &RasterImage, roi: Option<Annotation>, id: &str, cfg: &RunConfig) -> massround::Result<BinaryMask> {
    let opts = cfg.roi_options()?;
    match (roi, cfg.detect) {
        (Some(a), DetectMode::Annotation) => {
            let rec = MiasRecord {
                refnum: id.to_string(),
                tissue: Tissue::Fatty,
                abnormality: Abnormality::Circ,
                severity: None,
                annotation: Some(a),
            };
            extract_roi(img, &rec, &opts)
        }
        _ => massround::dataset::segment_largest(img, &opts),
    }
}

fn analyze_image(path: &Path, roi: Option<Annotation>, id: &str, cfg: &RunConfig) -> CliResult<(BinaryMask, Analysis)> {
    let img = load_image(path)?;
    let mask = detect(&img, roi, id, cfg)?;
    let analysis = analyze_mask(&mask, cfg)?;
    Ok((mask, analysis))
}

fn file_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into())
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let id = args.id.clone().unwrap_or_else(|| file_id(&args.image));
    let (mask, analysis) = analyze_image(&args.image, args.roi, &id, &cfg)?;
    let csv = records_to_csv(&[FeatureRecord::from_analysis(&id, args.label, &analysis)]);
    match &args.out {
        Some(out) => write_with_config(out, csv, &cfg)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.overlay {
        write_with_config(path, write_pgm(&analysis.overlay(&mask)), &cfg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GeometryFile<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    geometry: massround::polygeom::OverlayGeometry,
    region_centroid: [f64; 2],
    flags: &'a [String],
}

fn signature_csv(analysis: &Analysis) -> String {
    let mut out = String::from("bin,theta,radius,smoothed\n");
    for (k, (r, s)) in analysis.signature.radii.iter().zip(&analysis.smoothed.radii).enumerate() {
        let theta = analysis.signature.bin_angle(k);
        out += &format!("{k},{},{},{}\n", sig6(theta), sig6(*r), sig6(*s));
    }
    out
}

fn extrema_csv(analysis: &Analysis) -> String {
    let mut out = String::from("bin,theta,radius\n");
    for e in &analysis.extrema.points {
        out += &format!("{},{},{}\n", e.bin, sig6(e.theta), sig6(e.radius));
    }
    out
}

pub fn render(args: &RenderArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let (mask, analysis) = analyze_image(&args.image, args.roi, &file_id(&args.image), &cfg)?;
    write_with_config(&args.out, write_pgm(&analysis.overlay(&mask)), &cfg)?;
    if let Some(path) = &args.geometry {
        let c = analysis.region_centroid;
        let file = GeometryFile {
            config: &cfg,
            geometry: analysis.overlay_geometry(),
            region_centroid: [c.col, c.row],
            flags: &analysis.flags,
        };
        write_file(path, to_json(&file))?;
    }
    if let Some(path) = &args.signature {
        write_with_config(path, signature_csv(&analysis), &cfg)?;
    }
    if let Some(path) = &args.extrema {
        write_with_config(path, extrema_csv(&analysis), &cfg)?;
    }
    Ok(())
}

/// Counts reported by [`batch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BatchSummary {
    pub rows: usize,
    pub failed: usize,
    pub missing_images: usize,
    pub without_coordinates: usize,
}

struct Job {
    id: String,
    record: MiasRecord,
    path: PathBuf,
}

/// Row ids: the refnum, suffixed `_2`, `_3`, ... for repeated refnums.
fn batch_jobs(records: &[MiasRecord], dir: &Path) -> Vec<Job> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut jobs: Vec<Job> = records
        .iter()
        .map(|r| {
            let n = seen.entry(r.refnum.as_str()).or_insert(0);
            *n += 1;
            let id = if *n == 1 { r.refnum.clone() } else { format!("{}_{}", r.refnum, n) };
            Job { id, record: r.clone(), path: dir.join(format!("{}.pgm", r.refnum)) }
        })
        .collect();
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    jobs
}

fn process(job: &Job, cfg: &RunConfig, overlays: Option<&Path>) -> CliResult<FeatureRecord> {
    let label = job.record.severity;
    let img = match load_image(&job.path) {
        Ok(img) => img,
        Err(_) => return Ok(FeatureRecord::failed(&job.id, label, "input")),
    };
    let mask = match cfg.detect {
        DetectMode::Annotation => cfg.roi_options().and_then(|o| extract_roi(&img, &job.record, &o)),
        DetectMode::Auto => detect(&img, None, &job.id, cfg),
    };
    let mask = match mask {
        Ok(m) => m,
        Err(e) => return Ok(FeatureRecord::failed(&job.id, label, crate::stage_name(e.stage()))),
    };
    match analyze_mask(&mask, cfg) {
        Ok(analysis) => {
            if let Some(dir) = overlays {
                write_file(&dir.join(format!("{}.overlay.pgm", job.id)), write_pgm(&analysis.overlay(&mask)))?;
            }
            Ok(FeatureRecord::from_analysis(&job.id, label, &analysis))
        }
        Err(e) => Ok(FeatureRecord::failed(&job.id, label, crate::stage_name(e.stage()))),
    }
}

/// Analyzes every record with coordinates whose image exists. Per-image
/// failures become flagged rows; only unreadable inputs abort.
pub fn batch(args: &BatchArgs) -> CliResult<BatchSummary> {
    let cfg = args.config.resolve()?;
    if !args.images.is_dir() {
        return Err(CliError::input(format!("{}: not a directory", args.images.display())));
    }
    let text = fs::read_to_string(&args.info)
        .map_err(|e| CliError::input(format!("{}: {e}", args.info.display())))?;
    let info = parse_mias_info(&text)?;
    for r in &info.rejects {
        eprintln!("{}:{}: skipped ({})", args.info.display(), r.line_number, r.reason);
    }
    let mut summary = BatchSummary::default();
    let with_coords: Vec<MiasRecord> = info.records.iter().filter(|r| r.annotation.is_some()).cloned().collect();
    summary.without_coordinates = info.records.len() - with_coords.len();
    let jobs: Vec<Job> = batch_jobs(&with_coords, &args.images)
        .into_iter()
        .filter(|j| {
            let present = j.path.is_file();
            if !present {
                summary.missing_images += 1;
                eprintln!("{}: missing image, skipped", j.path.display());
            }
            present
        })
        .collect();
    if let Some(dir) = &args.overlays {
        fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    }
    let rows: Vec<FeatureRecord> = jobs
        .par_iter()
        .map(|j| process(j, &cfg, args.overlays.as_deref()))
        .collect::<CliResult<_>>()?;
    summary.rows = rows.len();
    summary.failed = rows.iter().filter(|r| r.is_failed()).count();
    write_with_config(&args.out, records_to_csv(&rows), &cfg)?;
    if let Some(dir) = &args.overlays {
        write_file(&dir.join("run_config.json"), cfg.to_json())?;
    }
    eprintln!(
        "{} rows ({} failed), {} missing images, {} records without coordinates",
        summary.rows, summary.failed, summary.missing_images, summary.without_coordinates
    );
    Ok(summary)
}

/// Held-out partition stored with a model, by image id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredSplit {
    pub seed: u64,
    pub test_fraction: f64,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub feature_mode: FeatureMode,
    pub config: RunConfig,
    pub split: StoredSplit,
    pub model: LinearModel,
}

fn labeled_rows(records: Vec<FeatureRecord>) -> Vec<(FeatureRecord, Label)> {
    records.into_iter().filter(|r| !r.is_failed()).filter_map(|r| r.label.map(|l| (r, l))).collect()
}

fn feature_values(r: &FeatureRecord, mode: FeatureMode) -> CliResult<Vec<f64>> {
    r.feature_vector(mode).ok_or_else(|| CliError::input(format!("{}: row has no measurements", r.image_id)))
}

fn sample(r: &FeatureRecord, label: Label, mode: FeatureMode) -> CliResult<Sample> {
    Ok(Sample::new(feature_values(r, mode)?, label))
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let rows = labeled_rows(read_feature_csv(&args.features)?);
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no labeled, analyzed rows", args.features.display())));
    }
    let labels: Vec<Label> = rows.iter().map(|(_, l)| *l).collect();
    let split = stratified_split(&labels, cfg.test_fraction, cfg.seed)?;
    let train: Vec<Sample> =
        split.train.iter().map(|&i| sample(&rows[i].0, labels[i], cfg.feature_mode)).collect::<CliResult<_>>()?;
    let model = train_svm(&train, &cfg.train_params())?;
    let ids = |idx: &[usize]| idx.iter().map(|&i| rows[i].0.image_id.clone()).collect();
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        feature_mode: cfg.feature_mode,
        split: StoredSplit {
            seed: split.seed,
            test_fraction: split.test_fraction,
            train_ids: ids(&split.train),
            test_ids: ids(&split.test),
        },
        config: cfg,
        model,
    };
    write_file(&args.model, to_json(&file))?;
    eprintln!("trained on {} rows, {} held out", file.split.train_ids.len(), file.split.test_ids.len());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub subset: String,
    pub n_evaluated: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub config: RunConfig,
}

fn load_model(path: &Path) -> CliResult<ModelFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(CliError::input(format!("{}: unsupported format version {}", path.display(), file.format_version)));
    }
    Ok(file)
}

fn model_predictions(features: &Path, model: &Path, all: bool) -> CliResult<(String, Vec<Label>, Vec<Label>, RunConfig)> {
    let file = load_model(model)?;
    let rows = labeled_rows(read_feature_csv(features)?);
    let by_id: BTreeMap<&str, usize> = rows.iter().enumerate().map(|(i, (r, _))| (r.image_id.as_str(), i)).collect();
    let chosen: Vec<usize> = if all {
        (0..rows.len()).collect()
    } else {
        file.split.test_ids.iter().filter_map(|id| by_id.get(id.as_str()).copied()).collect()
    };
    if chosen.is_empty() {
        return Err(CliError::input(format!("{}: no rows to evaluate", features.display())));
    }
    let (mut pred, mut truth) = (Vec::new(), Vec::new());
    for i in chosen {
        let (r, label) = &rows[i];
        pred.push(file.model.predict(&feature_values(r, file.feature_mode)?)?.0);
        truth.push(*label);
    }
    let subset = if all { "all" } else { "test" };
    Ok((subset.into(), pred, truth, file.config))
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    let (subset, pred, truth, config) = match (&args.predictions, &args.features, &args.model) {
        (Some(path), _, _) => {
            let (p, t) = read_predictions(path)?;
            ("predictions".to_string(), p, t, args.config.resolve()?)
        }
        (None, Some(f), Some(m)) => model_predictions(f, m, args.all)?,
        _ => return Err(CliError::config("eval needs --predictions or both --features and --model")),
    };
    let confusion = confusion_matrix(&pred, &truth)?;
    let metrics = compute_metrics(&confusion);
    let table = metrics.table(&confusion, &args.scheme);
    print!("{table}");
    if let Some(path) = &args.report {
        let report = EvalReport { subset, n_evaluated: pred.len(), confusion, metrics, config };
        write_file(path, to_json(&report))?;
        write_file(&path.with_extension("txt"), table)?;
    }
    Ok(())
}

fn mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    write_pgm(&mask.to_image())
}

fn label_code(label: Label) -> char {
    match label {
        Label::Benign => 'B',
        Label::Malignant => 'M',
    }
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let corpus = generate_corpus(args.n_per_class, cfg.seed)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::output(&args.out, e))?;
    let mut labels = String::from(
        "filename,label,kind,base_radius,lobes,amplitude,axis_ratio,rotation,center_x,center_y,noise_amplitude,seed\n",
    );
    let mut info = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (i, shape) in corpus.iter().enumerate() {
        let s = &shape.spec;
        let (filename, (cx, cy)) = if args.mias {
            let refnum = format!("mdb{:03}", i + 1);
            let span = MIAS_SIDE - CORPUS_CANVAS;
            let (x0, y0) = (rng.gen_range(span / 8..span * 7 / 8), rng.gen_range(span / 8..span * 7 / 8));
            let placed = shape.mask.embed(MIAS_SIDE, MIAS_SIDE, x0, y0)?;
            let img = render_mammogram_like(&placed, rng.gen());
            write_file(&args.out.join(format!("{refnum}.pgm")), write_pgm(&img))?;
            let (cx, cy) = (s.center.0 + x0 as f64, s.center.1 + y0 as f64);
            let abnormality = if shape.label == Label::Malignant { "SPIC" } else { "CIRC" };
            info += &format!(
                "{refnum} G {abnormality} {} {} {} {}\n",
                label_code(shape.label),
                cx.round() as usize,
                MIAS_SIDE - 1 - cy.round() as usize,
                s.max_radius().ceil() as usize
            );
            (format!("{refnum}.pgm"), (cx, cy))
        } else {
            let name = format!("{}.pgm", shape.name);
            write_file(&args.out.join(&name), mask_pgm(&shape.mask))?;
            (name, s.center)
        };
        labels += &format!(
            "{filename},{},{},{},{},{},{},{},{},{},{},{}\n",
            shape.label,
            s.kind.name(),
            sig6(s.base_radius),
            s.lobes,
            sig6(s.amplitude),
            sig6(s.axis_ratio),
            sig6(s.rotation),
            sig6(cx),
            sig6(cy),
            sig6(s.noise_amplitude),
            s.seed
        );
    }
    write_file(&args.out.join("labels.csv"), labels)?;
    if args.mias {
        write_file(&args.out.join("info.txt"), info)?;
    }
    write_file(&args.out.join("run_config.json"), cfg.to_json())
}
