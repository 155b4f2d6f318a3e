//! Label Studio JSON export (the standard "JSON" export, one object per task).
//!
//! Rectangle results are expressed in percent of the original image with a
//! top-left origin; they are converted to normalized center boxes here.

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use super::yolo::{ParseMode, ParseWarning};
use super::{Annotation, BoundingBox, ClassTable, DatasetError};

/// Slack for percent coordinates that overshoot 100 by float noise.
const PERCENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaskErrorKind {
    #[error("task has no image reference in `data`")]
    MissingImage,
    #[error("unknown class name {0:?}")]
    UnknownClass(String),
    #[error("rectangle has no class label")]
    MissingLabel,
    #[error("rectangle is missing original_width/original_height")]
    MissingDimensions,
    #[error("rectangle {0} is outside the [0, 100] percent range")]
    OutOfRange(String),
    #[error("rotated rectangles ({0} degrees) are not supported")]
    Rotated(f64),
}

#[derive(Debug, Deserialize)]
struct Task {
    #[serde(default)]
    id: Option<Value>,
    #[serde(default)]
    data: serde_json::Map<String, Value>,
    #[serde(default)]
    annotations: Vec<TaskAnnotation>,
}

#[derive(Debug, Deserialize)]
struct TaskAnnotation {
    #[serde(default)]
    result: Vec<ResultItem>,
    #[serde(default)]
    was_cancelled: bool,
}

#[derive(Debug, Deserialize)]
struct ResultItem {
    #[serde(rename = "type", default)]
    kind: String,
    original_width: Option<u32>,
    original_height: Option<u32>,
    #[serde(default)]
    value: Value,
}

#[derive(Debug, Deserialize)]
struct RectValue {
    x: f64,
    y: f64,
    width: f64,
    height: f64,
    #[serde(default)]
    rotation: f64,
    #[serde(default)]
    rectanglelabels: Vec<String>,
    #[serde(default)]
    labels: Vec<String>,
}

/// One task of an export, before it is bound to an image on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentRecord {
    pub task_id: String,
    /// Image reference as written by Label Studio, e.g. `/data/upload/1/ab12-board.jpg`.
    pub image_ref: String,
    /// Known only when the task has at least one rectangle.
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub annotations: Vec<Annotation>,
}

impl FragmentRecord {
    pub fn source(&self) -> String {
        format!("labelstudio:task/{}", self.task_id)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ManifestFragment {
    pub records: Vec<FragmentRecord>,
    pub warnings: Vec<ParseWarning>,
}

pub fn parse_labelstudio_export(json_text: &str, classes: &ClassTable) -> Result<ManifestFragment, DatasetError> {
    parse_labelstudio_export_with(json_text, classes, ParseMode::Strict)
}

/// Parse an export. In lenient mode rectangles poking out of the image are
/// clipped and reported in `warnings` (the `line` there is the task index).
pub fn parse_labelstudio_export_with(
    json_text: &str,
    classes: &ClassTable,
    mode: ParseMode,
) -> Result<ManifestFragment, DatasetError> {
    let tasks: Vec<Task> = serde_json::from_str(json_text)?;
    let mut fragment = ManifestFragment::default();
    for (index, task) in tasks.iter().enumerate() {
        let task_id = match &task.id {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => index.to_string(),
        };
        let record = convert_task(task, task_id.clone(), classes, mode, index, &mut fragment.warnings)
            .map_err(|kind| DatasetError::LabelStudio { task: task_id, kind })?;
        fragment.records.push(record);
    }
    Ok(fragment)
}

fn convert_task(
    task: &Task,
    task_id: String,
    classes: &ClassTable,
    mode: ParseMode,
    index: usize,
    warnings: &mut Vec<ParseWarning>,
) -> Result<FragmentRecord, TaskErrorKind> {
    let image_ref = match task.data.get("image") {
        Some(Value::String(s)) => s.clone(),
        _ => return Err(TaskErrorKind::MissingImage),
    };
    let mut record = FragmentRecord {
        task_id,
        image_ref,
        width: None,
        height: None,
        annotations: Vec::new(),
    };
    // First completed annotation wins; later ones are alternative annotator passes.
    let Some(annotation) = task.annotations.iter().find(|a| !a.was_cancelled) else {
        return Ok(record);
    };
    for item in &annotation.result {
        if item.kind != "rectanglelabels" && item.kind != "rectangle" && item.kind != "labels" {
            continue;
        }
        let rect: RectValue = match serde_json::from_value(item.value.clone()) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let (Some(w), Some(h)) = (item.original_width, item.original_height) else {
            return Err(TaskErrorKind::MissingDimensions);
        };
        if w == 0 || h == 0 {
            return Err(TaskErrorKind::MissingDimensions);
        }
        record.width.get_or_insert(w);
        record.height.get_or_insert(h);

        let name = rect
            .rectanglelabels
            .first()
            .or_else(|| rect.labels.first())
            .ok_or(TaskErrorKind::MissingLabel)?;
        let class = classes
            .match_name(name)
            .ok_or_else(|| TaskErrorKind::UnknownClass(name.clone()))?;
        if rect.rotation.abs() > 1e-9 {
            return Err(TaskErrorKind::Rotated(rect.rotation));
        }
        let bbox = percent_rect_to_box(&rect, mode, index, warnings)?;
        record.annotations.push(Annotation::new(class, bbox));
    }
    Ok(record)
}

fn percent_rect_to_box(
    rect: &RectValue,
    mode: ParseMode,
    index: usize,
    warnings: &mut Vec<ParseWarning>,
) -> Result<BoundingBox, TaskErrorKind> {
    let values = [rect.x, rect.y, rect.width, rect.height];
    if values.iter().any(|v| !v.is_finite()) || rect.width <= 0.0 || rect.height <= 0.0 {
        return Err(TaskErrorKind::OutOfRange(format!(
            "x={} y={} width={} height={}",
            rect.x, rect.y, rect.width, rect.height
        )));
    }
    let in_range = |start: f64, extent: f64| start >= -PERCENT_EPS && start + extent <= 100.0 + PERCENT_EPS;
    let (mut x, mut y, mut width, mut height) = (rect.x, rect.y, rect.width, rect.height);
    if !(in_range(x, width) && in_range(y, height)) {
        let description = format!("x={x} y={y} width={width} height={height}");
        if mode == ParseMode::Strict {
            return Err(TaskErrorKind::OutOfRange(description));
        }
        let x1 = (x + width).clamp(0.0, 100.0);
        let y1 = (y + height).clamp(0.0, 100.0);
        x = x.clamp(0.0, 100.0);
        y = y.clamp(0.0, 100.0);
        width = x1 - x;
        height = y1 - y;
        if width <= 0.0 || height <= 0.0 {
            return Err(TaskErrorKind::OutOfRange(description));
        }
        warnings.push(ParseWarning {
            line: index,
            message: format!("rectangle {description} clipped to image"),
        });
    }
    let bbox = BoundingBox {
        cx: (x + width / 2.0) / 100.0,
        cy: (y + height / 2.0) / 100.0,
        w: width / 100.0,
        h: height / 100.0,
    };
    // Float noise at the 100% edge can push w or h a hair above 1.
    let bbox = BoundingBox {
        cx: bbox.cx.clamp(0.0, 1.0),
        cy: bbox.cy.clamp(0.0, 1.0),
        w: bbox.w.min(1.0),
        h: bbox.h.min(1.0),
    };
    bbox.validate().map_err(|e| TaskErrorKind::OutOfRange(e.to_string()))?;
    Ok(bbox)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset_io::ClassLabel;

    fn export(label: &str, x: f64, y: f64, w: f64, h: f64) -> String {
        format!(
            r#"[{{"id": 7, "data": {{"image": "/data/upload/1/board.jpg"}},
                "annotations": [{{"result": [{{
                    "type": "rectanglelabels", "original_width": 640, "original_height": 480,
                    "value": {{"x": {x}, "y": {y}, "width": {w}, "height": {h}, "rotation": 0,
                               "rectanglelabels": ["{label}"]}}
                }}]}}]}}]"#
        )
    }

    fn one(text: &str) -> Result<Annotation, DatasetError> {
        let f = parse_labelstudio_export(text, &ClassTable::default())?;
        Ok(f.records[0].annotations[0])
    }

    #[test]
    fn centered_box() {
        let a = one(&export("capacitor", 25.0, 25.0, 50.0, 50.0)).unwrap();
        assert_eq!(a.class, ClassLabel::Capacitor);
        assert_eq!(a.bbox, BoundingBox::new(0.5, 0.5, 0.5, 0.5).unwrap());
    }

    #[test]
    fn full_image_box() {
        let a = one(&export("Electrolytic Capacitor", 0.0, 0.0, 100.0, 100.0)).unwrap();
        assert_eq!(a.class, ClassLabel::ElectrolyticCapacitor);
        assert_eq!(a.bbox, BoundingBox::new(0.5, 0.5, 1.0, 1.0).unwrap());
    }

    #[test]
    fn metadata() {
        let f = parse_labelstudio_export(&export("ic", 10.0, 10.0, 5.0, 5.0), &ClassTable::default()).unwrap();
        let r = &f.records[0];
        assert_eq!(r.task_id, "7");
        assert_eq!(r.image_ref, "/data/upload/1/board.jpg");
        assert_eq!((r.width, r.height), (Some(640), Some(480)));
        assert_eq!(r.source(), "labelstudio:task/7");
    }

    #[test]
    fn unknown_class() {
        let err = one(&export("inductor", 10.0, 10.0, 5.0, 5.0)).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::LabelStudio { kind: TaskErrorKind::UnknownClass(ref n), .. } if n == "inductor"
        ));
    }

    #[test]
    fn out_of_range_strict_and_lenient() {
        let text = export("diode", 90.0, 10.0, 20.0, 10.0);
        assert!(matches!(
            one(&text).unwrap_err(),
            DatasetError::LabelStudio {
                kind: TaskErrorKind::OutOfRange(_),
                ..
            }
        ));
        let f = parse_labelstudio_export_with(&text, &ClassTable::default(), ParseMode::Lenient).unwrap();
        assert_eq!(f.warnings.len(), 1);
        let b = f.records[0].annotations[0].bbox;
        assert!((b.w - 0.1).abs() < 1e-12);
        assert!((b.cx - 0.95).abs() < 1e-12);
    }

    #[test]
    fn missing_dimensions() {
        let text = r#"[{"data": {"image": "a.jpg"}, "annotations": [{"result": [
            {"type": "rectanglelabels", "value": {"x": 1, "y": 1, "width": 2, "height": 2, "rectanglelabels": ["coil"]}}
        ]}]}]"#;
        let err = parse_labelstudio_export(text, &ClassTable::default()).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::LabelStudio { kind: TaskErrorKind::MissingDimensions, ref task } if task == "0"
        ));
    }

    #[test]
    fn unannotated_and_cancelled_tasks() {
        let text = r#"[
            {"id": 1, "data": {"image": "a.jpg"}, "annotations": []},
            {"id": 2, "data": {"image": "b.jpg"}, "annotations": [{"was_cancelled": true, "result": [
                {"type": "rectanglelabels", "value": {"x": 1, "y": 1, "width": 2, "height": 2, "rectanglelabels": ["coil"]}}
            ]}]}
        ]"#;
        let f = parse_labelstudio_export(text, &ClassTable::default()).unwrap();
        assert_eq!(f.records.len(), 2);
        assert!(f.records.iter().all(|r| r.annotations.is_empty() && r.width.is_none()));
    }

    #[test]
    fn empty_export() {
        let f = parse_labelstudio_export("[]", &ClassTable::default()).unwrap();
        assert!(f.records.is_empty());
    }

    #[test]
    fn area_preserved() {
        for (x, y, w, h) in [
            (3.3, 7.1, 11.7, 2.9),
            (0.0, 0.0, 33.333, 66.667),
            (12.5, 80.0, 0.01, 20.0),
        ] {
            let a = one(&export("resistor", x, y, w, h)).unwrap();
            assert!(((w / 100.0) * (h / 100.0) - a.bbox.area()).abs() <= 1e-12);
        }
    }
}
