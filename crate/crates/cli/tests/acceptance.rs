//! Acceptance suite. Run with
//! `cargo test -p massround-cli --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion. Set `MIAS_DIR` (and optionally
//! `MIAS_INFO`) to run the end-to-end smoke on real MIAS images.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use massround::classifier::{compute_metrics, stratified_split, train_svm};
use massround::interp::{count_interpolated_pixels, rasterize_disk};
use massround::pipeline::{analyze_mask, FeatureMode, CSV_HEADER};
use massround::polygeom::{polygon_centroid, polygon_from_extrema, shoelace_area, Circle, Point, Polygon};
use massround::raster::{connected_components, erode, otsu_threshold, read_pgm, BinaryMask, StructuringElement};
use massround::signature::{
    find_maxima, radial_signature, region_centroid, smooth_signature, trace_boundary, Centroid, DetectorParams,
    Extremum, RadialSignature, SignatureExtrema,
};
use massround::synth::{generate_corpus, generate_shape, ShapeKind, ShapeSpec};
use massround::{ConfusionMatrix, FeatureRecord, Label, RasterImage, RunConfig, Sample};
use massround_cli::commands::{self, EvalReport};
use massround_cli::records::read_feature_csv;
use massround_cli::{BatchArgs, ConfigArgs, EvalArgs, SynthArgs, TrainArgs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn metrics_reproduction() -> Outcome {
    let m = compute_metrics(&ConfusionMatrix::new(51, 5, 61, 1));
    let printed = [
        ("sensitivity", m.sensitivity, 98.08),
        ("specificity", m.specificity, 92.42),
        ("accuracy", m.accuracy, 94.92),
        ("precision", m.precision, 91.07),
    ];
    for (name, got, want) in printed {
        let got = got.ok_or_else(|| format!("{name} undefined"))?;
        check((got - want).abs() <= 0.05, || format!("{name} {got:.4} vs {want}"))?;
    }
    Ok(printed.iter().map(|(n, g, _)| format!("{n} {:.2}", g.unwrap())).collect::<Vec<_>>().join(", "))
}

fn random_radial_polygon(rng: &mut ChaCha8Rng) -> Polygon {
    let n = rng.gen_range(3..=20);
    let c = Centroid::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
    let points = (0..n)
        .map(|i| Extremum {
            bin: i,
            theta: (i as f64 + rng.gen_range(0.25..0.75)) * TAU / n as f64,
            radius: rng.gen_range(5.0..40.0),
        })
        .collect();
    polygon_from_extrema(&SignatureExtrema { points }, &c).unwrap()
}

fn point_in_polygon(p: Point, v: &[Point]) -> bool {
    let mut inside = false;
    let mut j = v.len() - 1;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn shoelace_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_area, mut worst_centroid) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let poly = random_radial_polygon(&mut rng);
        let v = poly.vertices();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in v {
            (x0, x1, y0, y1) = (x0.min(p.x), x1.max(p.x), y0.min(p.y), y1.max(p.y));
        }
        let samples = 1_000_000;
        let (mut hits, mut sx, mut sy) = (0usize, 0.0, 0.0);
        for _ in 0..samples {
            let p = Point::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
            if point_in_polygon(p, v) {
                hits += 1;
                sx += p.x;
                sy += p.y;
            }
        }
        let mc_area = hits as f64 / samples as f64 * (x1 - x0) * (y1 - y0);
        let area = shoelace_area(&poly).abs();
        let rel = (area - mc_area).abs() / area;
        let c = polygon_centroid(&poly).map_err(|e| e.to_string())?;
        let dist = c.distance(&Point::new(sx / hits as f64, sy / hits as f64));
        check(rel <= 0.01, || format!("polygon {i}: area {area:.2} vs Monte Carlo {mc_area:.2}"))?;
        check(dist <= 0.5, || format!("polygon {i}: centroid off by {dist:.3} px"))?;
        worst_area = worst_area.max(rel);
        worst_centroid = worst_centroid.max(dist);
    }
    Ok(format!("worst area error {:.3}%, worst centroid error {worst_centroid:.3} px", 100.0 * worst_area))
}

/// Seed of the synthetic corpus used for the separation criterion.
const CORPUS_SEED: u64 = 7;

fn shape_family_separation() -> Outcome {
    let cfg = RunConfig::default();
    let corpus = generate_corpus(40, CORPUS_SEED).map_err(|e| e.to_string())?;
    let mut records = Vec::new();
    for s in &corpus {
        let a = analyze_mask(&s.mask, &cfg).map_err(|e| format!("{}: {e}", s.name))?;
        records.push(FeatureRecord::from_analysis(&s.name, Some(s.label), &a));
    }
    let ratio = |r: &FeatureRecord| r.measurements.as_ref().unwrap().fill_ratio;
    let of = |l: Label| records.iter().filter(move |r| r.label == Some(l)).map(ratio);
    let benign_max = of(Label::Benign).fold(f64::MIN, f64::max);
    let malignant_min = of(Label::Malignant).fold(f64::MAX, f64::min);
    check(benign_max < malignant_min, || format!("benign max {benign_max:.4} >= malignant min {malignant_min:.4}"))?;

    let labels: Vec<Label> = corpus.iter().map(|s| s.label).collect();
    let split = stratified_split(&labels, cfg.test_fraction, cfg.seed).map_err(|e| e.to_string())?;
    let sample = |i: usize| Sample::new(records[i].feature_vector(FeatureMode::Default).unwrap(), labels[i]);
    let train: Vec<Sample> = split.train.iter().map(|&i| sample(i)).collect();
    let model = train_svm(&train, &cfg.train_params()).map_err(|e| e.to_string())?;
    let correct = split
        .test
        .iter()
        .filter(|&&i| model.predict(&sample(i).features).map(|p| p.0 == labels[i]).unwrap_or(false))
        .count();
    let accuracy = 100.0 * correct as f64 / split.test.len() as f64;
    check(accuracy >= 95.0, || format!("held-out accuracy {accuracy:.2}%"))?;
    Ok(format!(
        "benign max {benign_max:.4} < malignant min {malignant_min:.4}, held-out accuracy {accuracy:.2}% on {}",
        split.test.len()
    ))
}

fn signature_of(mask: &BinaryMask) -> RadialSignature {
    radial_signature(&trace_boundary(mask).unwrap(), region_centroid(mask).unwrap(), 360).unwrap()
}

fn detected(mask: &BinaryMask) -> SignatureExtrema {
    find_maxima(&smooth_signature(&signature_of(mask), 5).unwrap(), DetectorParams::default())
}

fn signature_fidelity() -> Outcome {
    let disk = generate_shape(&ShapeSpec::disk(30.0, (40.0, 40.0)), 81, 81).map_err(|e| e.to_string())?;
    let cv = signature_of(&disk).coefficient_of_variation();
    check(cv < 0.05, || format!("disk coefficient of variation {cv:.4}"))?;

    let mut cases = 0;
    for k in 2..=8u32 {
        for step in 0..=6 {
            let a = 0.2 + 0.05 * step as f64;
            let r = 40.0;
            let c = r * (1.0 + a) + 4.0;
            let side = (2.0 * c) as usize + 1;
            let m = generate_shape(&ShapeSpec::lobed(ShapeKind::Lobular, r, k, a, (c, c)), side, side)
                .map_err(|e| e.to_string())?;
            let found = detected(&m).len();
            check(found == k as usize, || format!("k={k} a={a:.2}: {found} maxima"))?;
            cases += 1;
        }
    }

    let square = BinaryMask::from_fn(81, 81, |x, y| x.abs_diff(40) <= 20 && y.abs_diff(40) <= 20);
    let ex = detected(&square);
    check(ex.len() == 4, || format!("square: {} maxima", ex.len()))?;
    for corner in [45usize, 135, 225, 315] {
        let near = ex.points.iter().any(|e| {
            let d = e.bin.abs_diff(corner);
            d.min(360 - d) <= 2
        });
        check(near, || format!("square: no maximum within 2 bins of {corner}"))?;
    }
    Ok(format!("disk CV {cv:.4}, {cases} lobed shapes exact, square corners matched"))
}

fn naive_counts(tumor: &BinaryMask, circle: &Circle) -> (usize, usize) {
    let r2 = circle.radius * circle.radius;
    let (mut fill, mut protrusion) = (0, 0);
    for y in 0..tumor.height() {
        for x in 0..tumor.width() {
            let inside = (x as f64 - circle.center.x).powi(2) + (y as f64 - circle.center.y).powi(2) <= r2;
            match (tumor.get(x, y), inside) {
                (false, true) => fill += 1,
                (true, false) => protrusion += 1,
                _ => {}
            }
        }
    }
    (fill, protrusion)
}

fn pixel_count_oracle() -> Outcome {
    let small = rasterize_disk(&Circle::new(Point::new(10.0, 10.0), 2.0).map_err(|e| e.to_string())?, 21, 21);
    check(small.count() == 13, || format!("rasterize_disk(r=2) has {} pixels", small.count()))?;
    let cfg = RunConfig::default();
    let mut shapes: Vec<(String, BinaryMask)> = generate_corpus(40, CORPUS_SEED)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|s| (s.name, s.mask))
        .collect();
    for k in 2..=8u32 {
        let spec = ShapeSpec::lobed(ShapeKind::Lobular, 40.0, k, 0.35, (60.0, 60.0));
        shapes.push((format!("lobed_{k}"), generate_shape(&spec, 121, 121).map_err(|e| e.to_string())?));
    }
    for (name, m) in &shapes {
        let a = analyze_mask(m, &cfg).map_err(|e| format!("{name}: {e}"))?;
        let got = count_interpolated_pixels(m, &a.circle).map_err(|e| format!("{name}: {e}"))?;
        let want = naive_counts(m, &a.circle);
        check((got.fill_count, got.protrusion_count) == want, || {
            format!("{name}: ({}, {}) vs enumeration {want:?}", got.fill_count, got.protrusion_count)
        })?;
    }
    Ok(format!("{} shapes match enumeration, disk r=2 has 13 pixels", shapes.len()))
}

fn naive_erode(m: &BinaryMask, side: usize, bits: &[bool]) -> BinaryMask {
    let half = (side / 2) as isize;
    let offsets: Vec<(isize, isize)> = (0..bits.len())
        .filter(|&i| bits[i])
        .map(|i| ((i % side) as isize - half, (i / side) as isize - half))
        .collect();
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        offsets.iter().all(|&(dx, dy)| m.get_or_bg(x as isize + dx, y as isize + dy))
    })
}

fn flood_fill_count(m: &BinaryMask) -> usize {
    let mut seen = HashSet::new();
    let mut count = 0;
    for start in m.foreground() {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut queue = VecDeque::from([start]);
        while let Some((x, y)) = queue.pop_front() {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if m.get_or_bg(nx, ny) && seen.insert((nx as usize, ny as usize)) {
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
        }
    }
    count
}

fn sweep_otsu(img: &RasterImage) -> Option<u8> {
    let px = img.pixels();
    let n = px.len() as i128;
    let total: i128 = px.iter().map(|&v| v as i128).sum();
    let mut best: Option<(u8, i128, i128)> = None;
    for t in 0..=255u8 {
        let (n0, s0) = px.iter().filter(|&&v| v <= t).fold((0i128, 0i128), |(c, s), &v| (c + 1, s + v as i128));
        let n1 = n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let (num, den) = ((s0 * n - total * n0).pow(2), n0 * n1);
        if best.map_or(true, |(_, bn, bd)| num * bd > bn * den) {
            best = Some((t, num, den));
        }
    }
    best.map(|b| b.0)
}

fn morphology_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for i in 0..200 {
        let density = rng.gen_range(0.05..0.95);
        let m = BinaryMask::from_fn(32, 32, |_, _| rng.gen_bool(density));
        let side = [1, 3, 5][rng.gen_range(0..3)];
        let mut bits: Vec<bool> = (0..side * side).map(|_| rng.gen_bool(0.6)).collect();
        bits[side * side / 2] = true;
        let se = StructuringElement::new(side, bits.clone()).map_err(|e| e.to_string())?;
        check(erode(&m, &se) == naive_erode(&m, side, &bits), || format!("mask {i}: erosion differs"))?;
        let (got, want) = (connected_components(&m).component_count(), flood_fill_count(&m));
        check(got == want, || format!("mask {i}: {got} components vs flood fill {want}"))?;
    }
    for i in 0..50 {
        let levels: Vec<u8> = (0..rng.gen_range(1..8)).map(|_| rng.gen()).collect();
        let img = RasterImage::from_fn(32, 32, |_, _| {
            if i % 2 == 0 {
                levels[rng.gen_range(0..levels.len())]
            } else {
                rng.gen()
            }
        })
        .map_err(|e| e.to_string())?;
        let mut hist = [0u64; 256];
        for &v in img.pixels() {
            hist[v as usize] += 1;
        }
        let (got, want) = (otsu_threshold(&hist), sweep_otsu(&img));
        check(got == want, || format!("image {i}: Otsu {got:?} vs sweep {want:?}"))?;
    }
    Ok("200 masks and 50 images agree".into())
}

fn mias_source(scratch: &Path) -> Result<(PathBuf, PathBuf, &'static str), String> {
    if let Ok(dir) = std::env::var("MIAS_DIR") {
        let dir = PathBuf::from(dir);
        let info = std::env::var("MIAS_INFO").map(PathBuf::from).unwrap_or_else(|_| {
            ["Info.txt", "info.txt", "Info.TXT"].iter().map(|n| dir.join(n)).find(|p| p.is_file()).unwrap_or(dir.join("Info.txt"))
        });
        return Ok((dir, info, "MIAS_DIR"));
    }
    let out = scratch.join("synthetic");
    let config = ConfigArgs { seed: Some(11), ..ConfigArgs::default() };
    commands::synth(&SynthArgs { out: out.clone(), n_per_class: 5, mias: true, config })
        .map_err(|e| e.to_string())?;
    let info = out.join("info.txt");
    Ok((out, info, "10 synthesized 1024x1024 images"))
}

fn mias_smoke() -> Outcome {
    let scratch = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let (images, info, source) = mias_source(scratch.path())?;
    let csv = scratch.path().join("features.csv");
    let overlays = scratch.path().join("overlays");
    let summary = commands::batch(&BatchArgs {
        images,
        info,
        out: csv.clone(),
        overlays: Some(overlays.clone()),
        config: ConfigArgs::default(),
    })
    .map_err(|e| format!("batch aborted: {e}"))?;
    check(summary.rows >= 10, || format!("only {} rows analyzed", summary.rows))?;

    let text = fs::read_to_string(&csv).map_err(|e| e.to_string())?;
    check(text.lines().next() == Some(CSV_HEADER), || "CSV header mismatch".into())?;
    let rows = read_feature_csv(&csv).map_err(|e| e.to_string())?;
    check(rows.len() == summary.rows, || format!("{} rows parsed, {} written", rows.len(), summary.rows))?;
    for r in rows.iter().filter(|r| !r.is_failed()) {
        let path = overlays.join(format!("{}.overlay.pgm", r.image_id));
        let bytes = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        read_pgm(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    }

    let model = scratch.path().join("model.json");
    commands::train(&TrainArgs { features: csv.clone(), model: model.clone(), config: ConfigArgs::default() })
        .map_err(|e| format!("train: {e}"))?;
    let report = scratch.path().join("report.json");
    commands::eval(&EvalArgs {
        features: Some(csv),
        model: Some(model),
        predictions: None,
        all: false,
        report: Some(report.clone()),
        scheme: "Proposed".into(),
        config: ConfigArgs::default(),
    })
    .map_err(|e| format!("eval: {e}"))?;
    let parsed: EvalReport =
        serde_json::from_str(&fs::read_to_string(&report).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let accuracy = parsed.metrics.accuracy.map_or("undefined".to_string(), |a| format!("{a:.2}%"));
    Ok(format!(
        "{source}: {} rows ({} flagged), report on {} held-out rows, accuracy {accuracy} (informational)",
        summary.rows, summary.failed, parsed.n_evaluated
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome, u64); 7] = [
        ("1 metrics reproduction", metrics_reproduction, 1),
        ("2 shoelace oracle", shoelace_oracle, 30),
        ("3 shape-family separation", shape_family_separation, 60),
        ("4 signature fidelity", signature_fidelity, 10),
        ("5 pixel-count oracle", pixel_count_oracle, 5),
        ("6 morphology and labeling oracles", morphology_oracles, 10),
        ("7 end-to-end MIAS smoke", mias_smoke, 60),
    ];
    let mut failures = Vec::new();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => {
                Err(format!("{detail}; took {:.1} s, budget {budget} s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("PASS  {name}  [{:.2} s]  {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                println!("FAIL  {name}  [{:.2} s]  {why}", elapsed.as_secs_f64());
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
