//! Run the batch commands back to back on a generated dataset, the way the
//! `pcbcrm` binary does: ingest, roi, augment, eval and inventory.
//!
//! ```text
//! cargo run --example batch_pipeline -- [work-dir]
//! ```

use std::fs;
use std::path::PathBuf;

use serde_json::json;

use pcbcrm::cli::{
    cmd_augment, cmd_eval, cmd_ingest, cmd_inventory, cmd_roi, AugmentOptions, EvalOptions, EvalSplit, IngestOptions,
    Outcome, RoiOptions, RunConfig,
};
use pcbcrm::dataset_io::{write_detections, DatasetManifest, Split, SplitSpec};
use pcbcrm::preprocess::{AugmentOp, RasterImage};
use pcbcrm::Detection;

const CLASSES: [&str; 3] = ["capacitor", "resistor", "ic"];

fn report(step: &str, outcome: &Outcome) {
    println!("[{step}] {}", outcome.messages.join("\n        "));
    for w in &outcome.warnings {
        println!("        warning: {w}");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let work = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pcbcrm-demo"));
    let images = work.join("images");
    fs::create_dir_all(&images)?;

    // six boards, each with a few components drawn on it
    let mut tasks = Vec::new();
    for i in 0..6u32 {
        let mut img = RasterImage::filled(200, 150, [15, 18, 16]).unwrap();
        img.fill_rect(20 + i, 15, 180, 135 - i, [200, 205, 190]);
        let mut results = Vec::new();
        for k in 0..=(i % 3) {
            let (x, y) = (40 + 40 * k, 40 + 10 * i);
            img.fill_rect(x, y, x + 20, y + 16, [70, 50, 40]);
            results.push(json!({
                "type": "rectanglelabels",
                "original_width": 200,
                "original_height": 150,
                "value": {
                    "x": x as f64 / 2.0, "y": y as f64 / 1.5, "width": 10.0, "height": 16.0 / 1.5,
                    "rectanglelabels": [CLASSES[((i + k) % 3) as usize]]
                }
            }));
        }
        let name = format!("board_{i}.png");
        img.save(&images.join(&name))?;
        tasks.push(json!({ "id": i + 1, "data": { "image": format!("/data/upload/1/{name}") }, "annotations": [{ "result": results }] }));
    }
    let export = work.join("export.json");
    fs::write(&export, serde_json::to_string_pretty(&tasks)?)?;

    let out = work.join("out");
    let mut cfg = RunConfig {
        images_dir: Some(images.clone()),
        output_dir: out.clone(),
        ..Default::default()
    };
    let ingest = cmd_ingest(
        &cfg,
        &IngestOptions {
            export,
            split: SplitSpec::ValCount(2),
        },
    )?;
    report("ingest", &ingest);

    cfg.manifest = Some(out.join("manifest.json"));
    report(
        "roi",
        &cmd_roi(
            &cfg,
            &RoiOptions {
                margin: 2,
                contrast: None,
            },
        )?,
    );

    cfg.manifest = Some(out.join("roi/manifest.json"));
    cfg.images_dir = Some(out.join("roi/images"));
    report(
        "augment",
        &cmd_augment(
            &cfg,
            &AugmentOptions {
                target_min: 4,
                ops: AugmentOp::ALL.to_vec(),
            },
        )?,
    );

    // pretend detector: ground truth with a confidence attached
    let roi_manifest = DatasetManifest::from_json(&fs::read_to_string(out.join("roi/manifest.json"))?)?;
    let dets_dir = work.join("detections");
    fs::create_dir_all(&dets_dir)?;
    for r in roi_manifest.records_in(Split::Val) {
        let dets: Vec<Detection> = r
            .annotations
            .iter()
            .map(|a| Detection::new(a.class, 0.8, a.bbox))
            .collect();
        fs::write(dets_dir.join(format!("{}.txt", r.stem())), write_detections(&dets))?;
    }
    cfg.detections_dir = Some(dets_dir);
    report("eval", &cmd_eval(&cfg, &EvalOptions { split: EvalSplit::Val })?);
    report("inventory", &cmd_inventory(&cfg)?);
    println!("outputs under {}", out.display());
    Ok(())
}
