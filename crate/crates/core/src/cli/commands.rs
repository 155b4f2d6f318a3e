//! The batch commands. Each reads its inputs, writes everything under the
//! output directory and returns an [`Outcome`] describing what happened.
//! Inputs are never modified.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::crm::{aggregate, default_mapping, inventory, load_mapping, CrmInventory};
use crate::dataset_io::{
    assign_splits, parse_detections_with, parse_labelstudio_export_with, parse_yolo_labels_with, validate_manifest,
    write_yolo_labels, ClassLabel, ClassTable, DatasetManifest, Detection, ImageRecord, ParseMode, Severity, Split,
    SplitSpec,
};
use crate::eval::{evaluate, EvalParams, ImageSet};
use crate::preprocess::{
    augment, contrast_stretch, crop_and_remap, image_dimensions, segment_board_roi, AugmentOp, RasterImage, RoiRect,
};
use crate::stats::{augmented_records, class_histogram, plan_augmentation, split_summary};

use super::{CliError, Outcome, RunConfig};

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

fn parse_mode(cfg: &RunConfig) -> ParseMode {
    if cfg.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>, outcome: &mut Outcome) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Input(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    outcome.written.push(path.to_path_buf());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn load_manifest(cfg: &RunConfig) -> Result<DatasetManifest, CliError> {
    let path = RunConfig::existing(&cfg.manifest, "manifest")?;
    DatasetManifest::from_json(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn label_file_name(record: &ImageRecord) -> String {
    let parent = Path::new(&record.image_path)
        .parent()
        .filter(|p| !p.as_os_str().is_empty());
    let name = format!("{}.txt", record.stem());
    match parent {
        Some(p) => p.join(name).to_string_lossy().into_owned(),
        None => name,
    }
}

/// Report validation findings; any error-level finding fails the command.
fn report_findings(manifest: &DatasetManifest, outcome: &mut Outcome) {
    for finding in validate_manifest(manifest) {
        match finding.severity {
            Severity::Warning => outcome.warnings.push(finding.to_string()),
            Severity::Error => outcome.errors.push(finding.to_string()),
        }
    }
}

fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            if let Ok(v) = u8::from_str_radix(&s[i + 1..i + 3], 16) {
                out.push(v);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

/// Candidate file names under the images directory for a Label Studio image
/// reference, most specific first.
fn image_candidates(image_ref: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (path_part, query) = match image_ref.split_once('?') {
        Some((p, q)) => (p, Some(q)),
        None => (image_ref, None),
    };
    // local-files storage: /data/local-files/?d=dir/name.jpg
    if let Some(d) = query.and_then(|q| q.split('&').find_map(|kv| kv.strip_prefix("d="))) {
        let decoded = percent_decode(d);
        out.push(decoded.clone());
        if let Some(name) = Path::new(&decoded).file_name() {
            out.push(name.to_string_lossy().into_owned());
        }
    }
    let decoded = percent_decode(path_part);
    if let Some(name) = decoded.rsplit('/').next().filter(|n| !n.is_empty()) {
        out.push(name.to_string());
        // uploads are stored as `<8 hex chars>-<original name>`
        if let Some((prefix, rest)) = name.split_once('-') {
            if prefix.len() == 8 && prefix.chars().all(|c| c.is_ascii_hexdigit()) && !rest.is_empty() {
                out.push(rest.to_string());
            }
        }
    }
    out.dedup();
    out
}

pub struct IngestOptions {
    pub export: PathBuf,
    pub split: SplitSpec,
}

/// Label Studio export + images directory -> `manifest.json`.
pub fn cmd_ingest(cfg: &RunConfig, opts: &IngestOptions) -> Result<Outcome, CliError> {
    let images_dir = RunConfig::existing(&cfg.images_dir, "images_dir")?;
    let text = read_text(&opts.export)?;
    let classes = ClassTable::default();
    let fragment = parse_labelstudio_export_with(&text, &classes, parse_mode(cfg))
        .map_err(|e| CliError::Input(format!("{}: {e}", opts.export.display())))?;
    let mut outcome = Outcome::default();
    for w in &fragment.warnings {
        outcome
            .warnings
            .push(format!("{}: task #{}: {}", opts.export.display(), w.line, w.message));
    }
    if fragment.records.is_empty() {
        outcome
            .warnings
            .push(format!("{}: export contains no tasks", opts.export.display()));
    }

    let mut records = Vec::with_capacity(fragment.records.len());
    let mut missing = Vec::new();
    for task in &fragment.records {
        let candidates = image_candidates(&task.image_ref);
        let Some(found) = candidates.iter().find(|c| images_dir.join(c).is_file()) else {
            missing.push(format!(
                "task {}: image {} not found in {}",
                task.task_id,
                candidates.first().cloned().unwrap_or_else(|| task.image_ref.clone()),
                images_dir.display()
            ));
            continue;
        };
        let (file_w, file_h) = image_dimensions(&images_dir.join(found)).map_err(|e| CliError::Input(e.to_string()))?;
        if let (Some(w), Some(h)) = (task.width, task.height) {
            if (w, h) != (file_w, file_h) {
                outcome.warnings.push(format!(
                    "task {}: export says {w}x{h} but {found} is {file_w}x{file_h}; using the file",
                    task.task_id
                ));
            }
        }
        records.push(ImageRecord {
            image_path: found.clone(),
            width: file_w,
            height: file_h,
            split: Split::Train,
            annotations: task.annotations.clone(),
            source: Some(task.source()),
        });
    }
    if !missing.is_empty() {
        return Err(CliError::Input(missing.join("\n")));
    }
    assign_splits(&mut records, &opts.split);
    let manifest = DatasetManifest {
        records,
        class_table: classes,
        ..Default::default()
    };
    report_findings(&manifest, &mut outcome);
    let path = cfg.output_dir.join("manifest.json");
    write_file(&path, manifest.to_json(), &mut outcome)?;
    let summary = split_summary(&manifest);
    outcome.messages.push(format!(
        "ingested {} images (train {}, val {}) into {}",
        summary.total_images,
        summary.images_in(Split::Train),
        summary.images_in(Split::Val),
        path.display()
    ));
    Ok(outcome)
}

pub enum ConvertOptions {
    /// Manifest -> one label file per image plus `classes.txt`.
    ToYolo,
    /// Label files + images -> manifest.
    FromYolo { split: SplitSpec },
}

pub fn cmd_convert(cfg: &RunConfig, opts: &ConvertOptions) -> Result<Outcome, CliError> {
    let mut outcome = Outcome::default();
    match opts {
        ConvertOptions::ToYolo => {
            let manifest = load_manifest(cfg)?;
            report_findings(&manifest, &mut outcome);
            let dir = cfg.output_dir.join("labels");
            for record in &manifest.records {
                write_file(
                    &dir.join(label_file_name(record)),
                    write_yolo_labels(&record.annotations),
                    &mut outcome,
                )?;
            }
            let names: String = ClassLabel::ALL.iter().map(|c| format!("{}\n", c.name())).collect();
            write_file(&dir.join("classes.txt"), names, &mut outcome)?;
            outcome.messages.push(format!(
                "wrote {} label files to {}",
                manifest.records.len(),
                dir.display()
            ));
        }
        ConvertOptions::FromYolo { split } => {
            let labels_dir = RunConfig::existing(&cfg.labels_dir, "labels_dir")?;
            let images_dir = RunConfig::existing(&cfg.images_dir, "images_dir")?;
            let classes = ClassTable::default();
            let mut records = Vec::new();
            for image_path in list_files(images_dir, &IMAGE_EXTENSIONS)? {
                let abs = images_dir.join(&image_path);
                let (width, height) = image_dimensions(&abs).map_err(|e| CliError::Input(e.to_string()))?;
                let mut record = ImageRecord {
                    image_path: image_path.clone(),
                    width,
                    height,
                    split: Split::Train,
                    annotations: Vec::new(),
                    source: None,
                };
                let label_path = labels_dir.join(label_file_name(&record));
                if label_path.is_file() {
                    let parsed = parse_yolo_labels_with(&read_text(&label_path)?, &classes, parse_mode(cfg))
                        .map_err(|e| CliError::Input(format!("{}:{e}", label_path.display())))?;
                    for w in parsed.warnings {
                        outcome
                            .warnings
                            .push(format!("{}: line {}: {}", label_path.display(), w.line, w.message));
                    }
                    record.annotations = parsed.items;
                    record.source = Some(format!("yolo:{}", label_file_name(&record)));
                } else {
                    outcome
                        .warnings
                        .push(format!("{image_path}: no label file, treated as unannotated"));
                }
                records.push(record);
            }
            assign_splits(&mut records, split);
            let manifest = DatasetManifest {
                records,
                ..Default::default()
            };
            report_findings(&manifest, &mut outcome);
            let path = cfg.output_dir.join("manifest.json");
            write_file(&path, manifest.to_json(), &mut outcome)?;
            outcome.messages.push(format!(
                "wrote manifest with {} images to {}",
                manifest.records.len(),
                path.display()
            ));
        }
    }
    Ok(outcome)
}

/// Files under `dir` (recursively) with one of `extensions`, as sorted
/// `/`-separated relative paths.
fn list_files(dir: &Path, extensions: &[&str]) -> Result<Vec<String>, CliError> {
    fn walk(root: &Path, dir: &Path, extensions: &[&str], out: &mut Vec<String>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, extensions, out)?;
            } else if path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| extensions.contains(&e.to_ascii_lowercase().as_str()))
            {
                let rel = path.strip_prefix(root).expect("walk stays under root");
                let parts: Vec<String> = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect();
                out.push(parts.join("/"));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, dir, extensions, &mut out).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    out.sort();
    Ok(out)
}

pub fn cmd_stats(cfg: &RunConfig, target_min: Option<u64>) -> Result<Outcome, CliError> {
    let manifest = load_manifest(cfg)?;
    let mut outcome = Outcome::default();
    report_findings(&manifest, &mut outcome);
    let hist = class_histogram(&manifest);
    let summary = split_summary(&manifest);
    let dir = cfg.output_dir.join("stats");
    write_file(&dir.join("histogram.json"), hist.to_json(), &mut outcome)?;
    write_file(&dir.join("histogram.txt"), hist.to_table(), &mut outcome)?;
    write_file(&dir.join("splits.json"), to_json(&summary), &mut outcome)?;

    for s in &summary.splits {
        outcome.messages.push(format!(
            "{}: {} images ({} annotated), {} instances",
            s.split, s.images, s.annotated_images, s.instances
        ));
    }
    outcome.messages.push(hist.to_table().trim_end().to_string());
    for split in &summary.empty_splits {
        outcome.warnings.push(format!("split {split} is empty"));
    }
    for path in &summary.unannotated {
        outcome.warnings.push(format!("{path} has no annotations"));
    }
    if let Some(target) = target_min {
        let plan = plan_augmentation(&manifest, target, &AugmentOp::ALL);
        write_file(&dir.join("augment_plan.json"), plan.to_json(), &mut outcome)?;
        outcome.messages.push(format!(
            "augmentation plan for target {target}: {} ops",
            plan.steps.len()
        ));
        for (class, missing) in &plan.shortfall {
            outcome
                .warnings
                .push(format!("{class}: {missing} instances short of target {target}"));
        }
    }
    Ok(outcome)
}

pub struct RoiOptions {
    pub margin: u32,
    /// Percentile pair for contrast stretching after the crop.
    pub contrast: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct RoiEntry {
    roi: RoiRect,
    dropped_outside: usize,
    dropped_clipped: usize,
    clipped_kept: usize,
}

/// Segment, crop and (optionally) contrast-stretch every image.
pub fn cmd_roi(cfg: &RunConfig, opts: &RoiOptions) -> Result<Outcome, CliError> {
    let manifest = load_manifest(cfg)?;
    let images_dir = RunConfig::existing(&cfg.images_dir, "images_dir")?;
    let out_dir = cfg.output_dir.join("roi");
    let mut outcome = Outcome::default();

    let results: Vec<Result<(ImageRecord, RoiEntry, RasterImage), CliError>> = manifest
        .records
        .par_iter()
        .map(|record| {
            let ctx = |e: crate::preprocess::PreprocessError| CliError::Input(format!("{}: {e}", record.image_path));
            let image = RasterImage::load(&images_dir.join(&record.image_path)).map_err(ctx)?;
            let roi = segment_board_roi(&image, opts.margin).map_err(ctx)?;
            let cropped = crop_and_remap(&image, roi, &record.annotations).map_err(ctx)?;
            let pixels = match opts.contrast {
                Some((lo, hi)) => contrast_stretch(&cropped.image, lo, hi).map_err(ctx)?,
                None => cropped.image.clone(),
            };
            let new_record = ImageRecord {
                image_path: record.image_path.clone(),
                width: roi.width(),
                height: roi.height(),
                split: record.split,
                annotations: cropped.annotations.clone(),
                source: Some(format!("roi:{}", record.image_path)),
            };
            let entry = RoiEntry {
                roi,
                dropped_outside: cropped.dropped_outside,
                dropped_clipped: cropped.dropped_clipped,
                clipped_kept: cropped.clipped_kept,
            };
            Ok((new_record, entry, pixels))
        })
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut rois = BTreeMap::new();
    for result in results {
        let (record, entry, pixels) = result?;
        let dest = out_dir.join("images").join(&record.image_path);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Input(format!("{}: {e}", parent.display())))?;
        }
        pixels.save(&dest).map_err(|e| CliError::Input(e.to_string()))?;
        outcome.written.push(dest);
        write_file(
            &out_dir.join("labels").join(label_file_name(&record)),
            write_yolo_labels(&record.annotations),
            &mut outcome,
        )?;
        if entry.dropped_outside + entry.dropped_clipped > 0 {
            outcome.warnings.push(format!(
                "{}: dropped {} boxes outside the ROI and {} mostly-clipped boxes",
                record.image_path, entry.dropped_outside, entry.dropped_clipped
            ));
        }
        rois.insert(record.image_path.clone(), entry);
        records.push(record);
    }
    let cropped_manifest = DatasetManifest {
        records,
        class_table: manifest.class_table.clone(),
        ..Default::default()
    };
    write_file(&out_dir.join("manifest.json"), cropped_manifest.to_json(), &mut outcome)?;
    write_file(&out_dir.join("rois.json"), to_json(&rois), &mut outcome)?;
    outcome
        .messages
        .push(format!("cropped {} images into {}", rois.len(), out_dir.display()));
    Ok(outcome)
}

pub struct AugmentOptions {
    pub target_min: u64,
    pub ops: Vec<AugmentOp>,
}

/// Plan and execute class-balancing augmentation on the train split.
///
/// Output is a self-contained dataset: originals are copied next to the
/// augmented images. An empty plan writes nothing.
pub fn cmd_augment(cfg: &RunConfig, opts: &AugmentOptions) -> Result<Outcome, CliError> {
    let manifest = load_manifest(cfg)?;
    let images_dir = RunConfig::existing(&cfg.images_dir, "images_dir")?;
    let mut outcome = Outcome::default();
    let plan = plan_augmentation(&manifest, opts.target_min, &opts.ops);
    for (class, missing) in &plan.shortfall {
        outcome.warnings.push(format!(
            "{class}: still {missing} instances short of target {}",
            opts.target_min
        ));
    }
    if plan.is_empty() {
        outcome
            .messages
            .push("augmentation plan is empty; nothing written".to_string());
        return Ok(outcome);
    }

    let out_dir = cfg.output_dir.join("augment");
    let out_images = out_dir.join("images");
    for record in &manifest.records {
        let dest = out_images.join(&record.image_path);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Input(format!("{}: {e}", parent.display())))?;
        }
        fs::copy(images_dir.join(&record.image_path), &dest)
            .map_err(|e| CliError::Input(format!("{}: {e}", record.image_path)))?;
        outcome.written.push(dest);
    }

    let added = augmented_records(&manifest, &plan);
    let rendered: Vec<Result<(String, RasterImage), CliError>> = plan
        .steps
        .par_iter()
        .zip(added.par_iter())
        .map(|(step, record)| {
            let source = manifest.find(&step.image_path).expect("plan refers to manifest images");
            let image =
                RasterImage::load(&images_dir.join(&source.image_path)).map_err(|e| CliError::Input(e.to_string()))?;
            let (pixels, _) = augment(&image, &[], step.op);
            Ok((record.image_path.clone(), pixels))
        })
        .collect();
    for r in rendered {
        let (path, pixels) = r?;
        let dest = out_images.join(&path);
        pixels.save(&dest).map_err(|e| CliError::Input(e.to_string()))?;
        outcome.written.push(dest);
    }

    let mut augmented = manifest.clone();
    augmented.records.extend(added);
    for record in &augmented.records {
        write_file(
            &out_dir.join("labels").join(label_file_name(record)),
            write_yolo_labels(&record.annotations),
            &mut outcome,
        )?;
    }
    report_findings(&augmented, &mut outcome);
    write_file(&out_dir.join("manifest.json"), augmented.to_json(), &mut outcome)?;
    write_file(&out_dir.join("plan.json"), plan.to_json(), &mut outcome)?;
    outcome.messages.push(format!(
        "wrote {} augmented images to {}",
        plan.steps.len(),
        out_images.display()
    ));
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalSplit {
    #[default]
    Val,
    Train,
    All,
}

impl EvalSplit {
    fn includes(self, split: Split) -> bool {
        match self {
            EvalSplit::All => true,
            EvalSplit::Val => split == Split::Val,
            EvalSplit::Train => split == Split::Train,
        }
    }
}

/// Read every `<stem>.txt` detection file in `dir`, in parallel, keyed by stem.
fn read_detection_dir(
    dir: &Path,
    mode: ParseMode,
    outcome: &mut Outcome,
) -> Result<BTreeMap<String, Vec<Detection>>, CliError> {
    let files = list_files(dir, &["txt"])?;
    let classes = ClassTable::default();
    type FileResult = Result<(String, Vec<Detection>, Vec<String>), CliError>;
    let parsed: Vec<FileResult> = files
        .par_iter()
        .map(|rel| {
            let path = dir.join(rel);
            let text = read_text(&path)?;
            let parsed = parse_detections_with(&text, &classes, mode)
                .map_err(|e| CliError::Input(format!("{}:{e}", path.display())))?;
            let warnings = parsed
                .warnings
                .iter()
                .map(|w| format!("{}: line {}: {}", path.display(), w.line, w.message))
                .collect();
            let stem = rel.trim_end_matches(".txt").to_string();
            Ok((stem, parsed.items, warnings))
        })
        .collect();
    let mut out = BTreeMap::new();
    for p in parsed {
        let (stem, dets, warnings) = p?;
        outcome.warnings.extend(warnings);
        out.insert(stem, dets);
    }
    Ok(out)
}

pub struct EvalOptions {
    pub split: EvalSplit,
}

/// Evaluate `<detections_dir>/<stem>.txt` files against the manifest.
pub fn cmd_eval(cfg: &RunConfig, opts: &EvalOptions) -> Result<Outcome, CliError> {
    let manifest = load_manifest(cfg)?;
    let det_dir = RunConfig::existing(&cfg.detections_dir, "detections_dir")?;
    let mut outcome = Outcome::default();
    let mut by_stem: BTreeMap<String, &ImageRecord> = BTreeMap::new();
    for record in &manifest.records {
        let key = label_file_name(record).trim_end_matches(".txt").to_string();
        if by_stem.insert(key.clone(), record).is_some() {
            return Err(CliError::Input(format!(
                "two images share the detection file name {key}.txt"
            )));
        }
    }

    let mut files = read_detection_dir(det_dir, parse_mode(cfg), &mut outcome)?;
    let mut ground_truth = ImageSet::new();
    let mut detections = ImageSet::new();
    for (stem, record) in &by_stem {
        let dets = files.remove(stem);
        if !opts.split.includes(record.split) {
            if dets.is_some() {
                outcome.warnings.push(format!(
                    "{stem}.txt belongs to a {} image outside the evaluated split; ignored",
                    record.split
                ));
            }
            continue;
        }
        ground_truth.insert(record.image_path.clone(), record.annotations.clone());
        match dets {
            Some(d) => {
                detections.insert(record.image_path.clone(), d);
            }
            None => outcome.warnings.push(format!(
                "no detection file for {}; treated as zero detections",
                record.image_path
            )),
        }
    }
    if let Some(stem) = files.keys().next() {
        return Err(CliError::Input(format!(
            "{}: detections for an image that is not in the manifest",
            det_dir.join(format!("{stem}.txt")).display()
        )));
    }
    if ground_truth.is_empty() {
        outcome.warnings.push("no images in the evaluated split".to_string());
    }

    let params = EvalParams {
        iou_thresholds: cfg.iou_thresholds.clone(),
    };
    let report = evaluate(&ground_truth, &detections, &params).map_err(|e| CliError::Input(e.to_string()))?;
    for note in &report.notes {
        outcome.warnings.push(note.clone());
    }
    let dir = cfg.output_dir.join("eval");
    write_file(&dir.join("report.json"), report.to_json(), &mut outcome)?;
    write_file(&dir.join("report.md"), report.to_markdown(), &mut outcome)?;
    outcome.messages.push(report.summary_line());
    Ok(outcome)
}

/// Per-board and aggregate critical-raw-material inventories.
pub fn cmd_inventory(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let det_dir = RunConfig::existing(&cfg.detections_dir, "detections_dir")?;
    let mapping = match &cfg.mapping {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            load_mapping(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => default_mapping(),
    };
    let mut outcome = Outcome::default();
    let files = read_detection_dir(det_dir, parse_mode(cfg), &mut outcome)?;
    if files.is_empty() {
        outcome
            .warnings
            .push(format!("{}: no detection files", det_dir.display()));
    }
    let dir = cfg.output_dir.join("inventory");
    let mut boards = Vec::with_capacity(files.len());
    for (board, dets) in &files {
        let inv =
            inventory(board, dets, &mapping, cfg.confidence_floor).map_err(|e| CliError::Config(e.to_string()))?;
        write_file(
            &dir.join("boards").join(format!("{board}.json")),
            inv.to_json(),
            &mut outcome,
        )?;
        write_file(
            &dir.join("boards").join(format!("{board}.csv")),
            inv.to_csv(),
            &mut outcome,
        )?;
        boards.push(inv);
    }
    let total = if boards.is_empty() {
        CrmInventory::empty(&mapping, cfg.confidence_floor)
    } else {
        aggregate(&boards).map_err(|e| CliError::Input(e.to_string()))?
    };
    write_file(&dir.join("inventory.json"), total.to_json(), &mut outcome)?;
    write_file(&dir.join("inventory.csv"), total.to_csv(), &mut outcome)?;
    write_file(&dir.join("mapping.json"), to_json(total.mapping()), &mut outcome)?;

    let components: u64 = total.class_counts.values().sum();
    outcome.messages.push(format!(
        "{} boards, {} components at confidence >= {}, {} critical raw materials",
        total.boards.len(),
        components,
        cfg.confidence_floor,
        total.elements.len()
    ));
    for (element, tally) in &total.elements {
        let classes: BTreeSet<&str> = tally.contributing_classes.iter().map(|c| c.name()).collect();
        outcome.messages.push(format!(
            "  {element}: {} components ({})",
            tally.contributing_component_count,
            classes.into_iter().collect::<Vec<_>>().join(", ")
        ));
    }
    for (class, n) in &total.unmapped {
        outcome
            .warnings
            .push(format!("{n} {class} detections have no CRM mapping"));
    }
    Ok(outcome)
}
