//! MIAS annotation parsing and annotation-guided ROI extraction.
//!
//! Each line of the MIAS info file reads
//! `refnum tissue class [severity [x y radius]]`, with the center in a
//! bottom-left-origin frame.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classifier::Label;
use crate::error::{Error, Result};
use crate::raster::{
    connected_components, largest_component, open, threshold_otsu, BinaryMask, RasterImage, StructuringElement,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tissue {
    Fatty,
    FattyGlandular,
    DenseGlandular,
}

impl Tissue {
    fn code(self) -> char {
        match self {
            Tissue::Fatty => 'F',
            Tissue::FattyGlandular => 'G',
            Tissue::DenseGlandular => 'D',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Abnormality {
    Calc,
    Circ,
    Spic,
    Misc,
    Arch,
    Asym,
    Norm,
}

impl Abnormality {
    fn code(self) -> &'static str {
        match self {
            Abnormality::Calc => "CALC",
            Abnormality::Circ => "CIRC",
            Abnormality::Spic => "SPIC",
            Abnormality::Misc => "MISC",
            Abnormality::Arch => "ARCH",
            Abnormality::Asym => "ASYM",
            Abnormality::Norm => "NORM",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "CALC" => Abnormality::Calc,
            "CIRC" => Abnormality::Circ,
            "SPIC" => Abnormality::Spic,
            "MISC" => Abnormality::Misc,
            "ARCH" => Abnormality::Arch,
            "ASYM" => Abnormality::Asym,
            "NORM" => Abnormality::Norm,
            _ => return None,
        })
    }
}

/// Annotated lesion center and approximate radius, MIAS frame (origin at the
/// bottom-left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub center_x: u32,
    pub center_y: u32,
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiasRecord {
    pub refnum: String,
    pub tissue: Tissue,
    pub abnormality: Abnormality,
    pub severity: Option<Label>,
    pub annotation: Option<Annotation>,
}

impl fmt::Display for MiasRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.refnum, self.tissue.code(), self.abnormality.code())?;
        if let Some(s) = self.severity {
            write!(f, " {}", if s == Label::Malignant { 'M' } else { 'B' })?;
        }
        if let Some(a) = self.annotation {
            write!(f, " {} {} {}", a.center_x, a.center_y, a.radius)?;
        }
        Ok(())
    }
}

/// A line that failed the column grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedLine {
    pub line_number: usize,
    pub text: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MiasInfo {
    pub records: Vec<MiasRecord>,
    pub rejects: Vec<RejectedLine>,
}

fn parse_line(line: &str) -> std::result::Result<MiasRecord, String> {
    let cols: Vec<&str> = line.split_whitespace().collect();
    if cols.len() < 3 {
        return Err(format!("expected at least 3 columns, found {}", cols.len()));
    }
    let refnum = cols[0].to_string();
    let tissue = match cols[1] {
        "F" => Tissue::Fatty,
        "G" => Tissue::FattyGlandular,
        "D" => Tissue::DenseGlandular,
        t => return Err(format!("unknown tissue class {t:?}")),
    };
    let abnormality = Abnormality::parse(cols[2]).ok_or_else(|| format!("unknown abnormality {:?}", cols[2]))?;
    if abnormality == Abnormality::Norm {
        if cols.len() != 3 {
            return Err("NORM records take no further columns".into());
        }
        return Ok(MiasRecord { refnum, tissue, abnormality, severity: None, annotation: None });
    }
    let severity = match cols.get(3) {
        Some(&"B") => Label::Benign,
        Some(&"M") => Label::Malignant,
        Some(s) => return Err(format!("unknown severity {s:?}")),
        None => return Err("missing severity".into()),
    };
    let annotation = match cols.len() {
        4 => None,
        7 => {
            let num = |s: &str| s.parse::<u32>().map_err(|_| format!("bad number {s:?}"));
            Some(Annotation { center_x: num(cols[4])?, center_y: num(cols[5])?, radius: num(cols[6])? })
        }
        n => return Err(format!("expected 4 or 7 columns, found {n}")),
    };
    Ok(MiasRecord { refnum, tissue, abnormality, severity: Some(severity), annotation })
}

/// One record per non-empty line; failing lines go to `rejects` with their
/// 1-based line numbers.
pub fn parse_mias_info(text: &str) -> Result<MiasInfo> {
    let mut info = MiasInfo::default();
    let mut any = false;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        any = true;
        match parse_line(trimmed) {
            Ok(r) => info.records.push(r),
            Err(reason) => info.rejects.push(RejectedLine { line_number: i + 1, text: trimmed.to_string(), reason }),
        }
    }
    if !any {
        return Err(Error::EmptyAnnotations);
    }
    Ok(info)
}

/// Image row of a MIAS `y` coordinate.
pub fn mias_row(y: u32, height: usize) -> Option<usize> {
    (height as u64).checked_sub(1 + y as u64).map(|r| r as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoiOptions {
    pub margin_factor: f64,
    pub structuring_element: StructuringElement,
    pub min_area: usize,
}

impl Default for RoiOptions {
    fn default() -> Self {
        Self {
            margin_factor: 1.5,
            structuring_element: StructuringElement::square(3).expect("3 is odd"),
            min_area: 50,
        }
    }
}

/// Otsu, opening and largest-component selection on a whole image.
pub fn segment_largest(image: &RasterImage, opts: &RoiOptions) -> Result<BinaryMask> {
    let bin = threshold_otsu(image);
    if bin.degenerate {
        return Err(Error::NoContrast);
    }
    let opened = open(&bin.mask, &opts.structuring_element);
    largest_component(&connected_components(&opened), opts.min_area)
}

/// Segments the annotated lesion inside a square window of side
/// `2 * margin_factor * radius` around its center and returns the mask on the
/// full canvas.
pub fn extract_roi(image: &RasterImage, record: &MiasRecord, opts: &RoiOptions) -> Result<BinaryMask> {
    let a = record.annotation.ok_or_else(|| Error::MissingCoordinates(record.refnum.clone()))?;
    if !(opts.margin_factor >= 1.0) {
        return Err(Error::InvalidParameter(format!("margin factor {} < 1", opts.margin_factor)));
    }
    let (w, h) = (image.width() as i64, image.height() as i64);
    let row = mias_row(a.center_y, image.height()).ok_or(Error::DegenerateWindow)? as i64;
    let col = a.center_x as i64;
    let half = (opts.margin_factor * a.radius as f64).round() as i64;
    let (x0, x1) = ((col - half).max(0), (col + half + 1).min(w));
    let (y0, y1) = ((row - half).max(0), (row + half + 1).min(h));
    if x1 - x0 < 2 || y1 - y0 < 2 {
        return Err(Error::DegenerateWindow);
    }
    let window = image.crop(x0 as usize, y0 as usize, (x1 - x0) as usize, (y1 - y0) as usize)?;
    let mask = segment_largest(&window, opts)?;
    mask.embed(image.width(), image.height(), x0 as usize, y0 as usize)
}
