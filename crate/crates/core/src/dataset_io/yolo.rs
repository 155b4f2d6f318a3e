//! Whitespace-separated label and detection files.
//!
//! Label lines are `class_id cx cy w h`, detection lines are
//! `class_id confidence cx cy w h`. Blank lines are ignored; every other line
//! must parse or the whole file is rejected with the offending line number.

use std::fmt::Write as _;

use thiserror::Error;

use super::bbox::BoxError;
use super::{Annotation, BoundingBox, ClassLabel, ClassTable, Detection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    /// Out-of-range boxes are clipped into the image and reported as
    /// warnings instead of failing the file.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineErrorKind {
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("field `{field}` is not a number: {text:?}")]
    NotANumber { field: &'static str, text: String },
    #[error("class id {0:?} is not in the class table")]
    UnknownClassId(String),
    #[error("confidence {0} is outside [0, 1]")]
    ConfidenceOutOfRange(f64),
    #[error("invalid box: {0}")]
    InvalidBox(#[from] BoxError),
}

/// Failure to parse a label or detection file, pinned to a 1-based line.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: LineErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub items: Vec<T>,
    pub warnings: Vec<ParseWarning>,
}

const LABEL_FIELDS: [&str; 5] = ["class_id", "cx", "cy", "w", "h"];
const DETECTION_FIELDS: [&str; 6] = ["class_id", "confidence", "cx", "cy", "w", "h"];

pub fn parse_yolo_labels(text: &str, classes: &ClassTable) -> Result<Vec<Annotation>, ParseError> {
    parse_yolo_labels_with(text, classes, ParseMode::Strict).map(|p| p.items)
}

pub fn parse_yolo_labels_with(
    text: &str,
    classes: &ClassTable,
    mode: ParseMode,
) -> Result<Parsed<Annotation>, ParseError> {
    parse_lines(text, &LABEL_FIELDS, |line, fields, warnings| {
        let class = parse_class(fields[0], classes)?;
        let bbox = parse_box(&fields[1..5], &LABEL_FIELDS[1..5], mode, line, warnings)?;
        Ok(Annotation::new(class, bbox))
    })
}

pub fn parse_detections(text: &str, classes: &ClassTable) -> Result<Vec<Detection>, ParseError> {
    parse_detections_with(text, classes, ParseMode::Strict).map(|p| p.items)
}

pub fn parse_detections_with(
    text: &str,
    classes: &ClassTable,
    mode: ParseMode,
) -> Result<Parsed<Detection>, ParseError> {
    parse_lines(text, &DETECTION_FIELDS, |line, fields, warnings| {
        let class = parse_class(fields[0], classes)?;
        let confidence = parse_number(fields[1], "confidence")?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(LineErrorKind::ConfidenceOutOfRange(confidence));
        }
        let bbox = parse_box(&fields[2..6], &DETECTION_FIELDS[2..6], mode, line, warnings)?;
        Ok(Detection::new(class, confidence, bbox))
    })
}

fn parse_lines<T>(
    text: &str,
    names: &[&'static str],
    mut parse_fields: impl FnMut(usize, &[&str], &mut Vec<ParseWarning>) -> Result<T, LineErrorKind>,
) -> Result<Parsed<T>, ParseError> {
    let mut items = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != names.len() {
            return Err(ParseError {
                line,
                kind: LineErrorKind::FieldCount {
                    expected: names.len(),
                    found: fields.len(),
                },
            });
        }
        let item = parse_fields(line, &fields, &mut warnings).map_err(|kind| ParseError { line, kind })?;
        items.push(item);
    }
    Ok(Parsed { items, warnings })
}

fn parse_class(text: &str, classes: &ClassTable) -> Result<ClassLabel, LineErrorKind> {
    text.parse::<u32>()
        .ok()
        .and_then(|id| classes.by_id(id))
        .ok_or_else(|| LineErrorKind::UnknownClassId(text.to_string()))
}

fn parse_number(text: &str, field: &'static str) -> Result<f64, LineErrorKind> {
    // `f64::from_str` also accepts "inf" and "NaN"; neither is a coordinate.
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(LineErrorKind::NotANumber {
            field,
            text: text.to_string(),
        }),
    }
}

fn parse_box(
    fields: &[&str],
    names: &[&'static str],
    mode: ParseMode,
    line: usize,
    warnings: &mut Vec<ParseWarning>,
) -> Result<BoundingBox, LineErrorKind> {
    let mut values = [0.0; 4];
    for (slot, (text, name)) in values.iter_mut().zip(fields.iter().zip(names)) {
        *slot = parse_number(text, name)?;
    }
    let raw = BoundingBox {
        cx: values[0],
        cy: values[1],
        w: values[2],
        h: values[3],
    };
    match raw.validate() {
        Ok(()) => Ok(raw),
        Err(err) if mode == ParseMode::Lenient && !matches!(err, BoxError::Degenerate { .. }) => {
            let clamped = raw.clamp_to_image().ok_or(err)?;
            clamped.validate()?;
            warnings.push(ParseWarning {
                line,
                message: format!("{err}; clipped to image"),
            });
            Ok(clamped)
        }
        Err(err) => Err(err.into()),
    }
}

fn push_coord(out: &mut String, value: f64) {
    // `+ 0.0` folds -0.0 so it never prints as "-0.000000".
    let _ = write!(out, " {:.6}", value + 0.0);
}

/// Render annotations as a label file, one line per annotation.
pub fn write_yolo_labels(annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        let _ = write!(out, "{}", a.class.id());
        for v in [a.bbox.cx, a.bbox.cy, a.bbox.w, a.bbox.h] {
            push_coord(&mut out, v);
        }
        out.push('\n');
    }
    out
}

pub fn write_detections(detections: &[Detection]) -> String {
    let mut out = String::new();
    for d in detections {
        let _ = write!(out, "{}", d.class.id());
        for v in [d.confidence, d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h] {
            push_coord(&mut out, v);
        }
        out.push('\n');
    }
    out
}

/// Quantize every coordinate to what a write/parse round trip produces.
pub fn quantize_annotations(annotations: &[Annotation]) -> Vec<Annotation> {
    annotations
        .iter()
        .map(|a| Annotation::new(a.class, a.bbox.quantized()))
        .collect()
}
