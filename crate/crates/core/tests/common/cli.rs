//! Running the `pcbcrm` binary from tests.

use std::path::Path;
use std::process::{Command, Output};

use rand::Rng;

use pcbcrm::dataset_io::{write_detections, DatasetManifest, Split};
use pcbcrm::{ClassLabel, Detection};

use super::synth;

const ENV_VARS: [&str; 10] = [
    "PCBCRM_FLOOR",
    "PCBCRM_CONFIG",
    "PCBCRM_OUTPUT_DIR",
    "PCBCRM_JOBS",
    "PCBCRM_LENIENT",
    "PCBCRM_MANIFEST",
    "PCBCRM_IMAGES_DIR",
    "PCBCRM_LABELS_DIR",
    "PCBCRM_DETECTIONS_DIR",
    "PCBCRM_MAPPING",
];

pub fn pcbcrm() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pcbcrm"));
    for v in ENV_VARS {
        cmd.env_remove(v);
    }
    cmd
}

pub fn run(args: &[&str]) -> Output {
    pcbcrm().args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn step(args: &[&str]) -> Result<Output, String> {
    let out = run(args);
    if out.status.code() == Some(0) {
        Ok(out)
    } else {
        Err(format!("{:?} exited {:?}: {}", args, out.status.code(), stderr(&out)))
    }
}

/// Write perfect detections (confidence 0.9) for every val image of a
/// manifest, one file per image stem.
pub fn write_val_detections(manifest: &DatasetManifest, dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    for r in manifest.records_in(Split::Val) {
        let dets: Vec<Detection> = r
            .annotations
            .iter()
            .map(|a| Detection::new(a.class, 0.9, a.bbox))
            .collect();
        std::fs::write(dir.join(format!("{}.txt", r.stem())), write_detections(&dets)).unwrap();
    }
}

/// ingest -> roi -> augment -> eval -> inventory on `n` synthetic boards.
/// Returns the eval summary line.
pub fn pipeline<R: Rng>(rng: &mut R, root: &Path, n: usize, jobs: usize) -> Result<String, String> {
    let classes = [
        ClassLabel::Capacitor,
        ClassLabel::Resistor,
        ClassLabel::Ic,
        ClassLabel::Transistor,
    ];
    synth::write_dataset(rng, root, n, &classes);
    let out = root.join("out");
    let jobs = jobs.to_string();
    let common = ["--output-dir", p(&out), "--jobs", &jobs];
    let images = root.join("images");

    let mut args = vec!["ingest", "--export"];
    let export = root.join("export.json");
    args.extend([p(&export), "--images-dir", p(&images), "--val-count", "3"]);
    args.extend(common);
    step(&args)?;

    let manifest = out.join("manifest.json");
    let mut args = vec![
        "roi",
        "--manifest",
        p(&manifest),
        "--images-dir",
        p(&images),
        "--margin",
        "1",
    ];
    args.extend(common);
    step(&args)?;

    let roi_manifest = out.join("roi/manifest.json");
    let roi_images = out.join("roi/images");
    let mut args = vec![
        "augment",
        "--manifest",
        p(&roi_manifest),
        "--images-dir",
        p(&roi_images),
        "--target-min",
        "12",
    ];
    args.extend(common);
    step(&args)?;

    let aug_manifest_path = out.join("augment/manifest.json");
    let text = std::fs::read_to_string(&aug_manifest_path).map_err(|e| format!("augment output: {e}"))?;
    let aug_manifest = DatasetManifest::from_json(&text).map_err(|e| e.to_string())?;
    let dets = root.join("detections");
    write_val_detections(&aug_manifest, &dets);

    let mut args = vec![
        "eval",
        "--manifest",
        p(&aug_manifest_path),
        "--detections-dir",
        p(&dets),
    ];
    args.extend(common);
    let eval = step(&args)?;

    let mut args = vec!["inventory", "--detections-dir", p(&dets), "--floor", "0.5"];
    args.extend(common);
    step(&args)?;
    Ok(stdout(&eval).lines().next().unwrap_or_default().to_string())
}
