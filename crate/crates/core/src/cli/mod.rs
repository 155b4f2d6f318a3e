//! Command-line front end.
//!
//! Settings are layered: built-in defaults, then the `--config` TOML file,
//! then `PCBCRM_*` environment variables, then flags. Exit codes are 0 on
//! success, 1 for input errors (unreadable or malformed data) and 2 for
//! configuration errors (bad flags, settings or mapping files).

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_augment, cmd_convert, cmd_eval, cmd_ingest, cmd_inventory, cmd_roi, cmd_stats, AugmentOptions, ConvertOptions,
    EvalOptions, EvalSplit, IngestOptions, RoiOptions,
};
pub use config::{ConfigFile, RunConfig};

use crate::dataset_io::SplitSpec;
use crate::preprocess::AugmentOp;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

/// What a command did. Error entries are problems found in otherwise
/// readable input (e.g. validation failures); they make the run exit 1
/// after all outputs have been written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pcbcrm",
    version,
    about = "PCB component datasets, detector evaluation and critical raw material inventories"
)]
pub struct Cli {
    /// TOML settings file
    #[arg(long, global = true, env = "PCBCRM_CONFIG")]
    pub config: Option<PathBuf>,
    /// Directory that receives every output
    #[arg(long, global = true, env = "PCBCRM_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, env = "PCBCRM_JOBS")]
    pub jobs: Option<usize>,
    /// Clamp slightly out-of-range boxes instead of rejecting them
    #[arg(long, global = true, env = "PCBCRM_LENIENT")]
    pub lenient: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a manifest from a Label Studio export
    Ingest(IngestArgs),
    /// Convert between a manifest and per-image label files
    Convert(ConvertArgs),
    /// Class histogram and split summary
    Stats(StatsArgs),
    /// Crop every image to its board region
    Roi(RoiArgs),
    /// Balance classes with geometric augmentation
    Augment(AugmentArgs),
    /// Evaluate detections against the manifest
    Eval(EvalArgs),
    /// Critical raw material inventory from detections
    Inventory(InventoryArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Number of images to put in the val split
    #[arg(long, conflicts_with_all = ["val_fraction", "val_list"])]
    pub val_count: Option<usize>,
    /// Fraction of images to put in the val split
    #[arg(long, conflicts_with = "val_list")]
    pub val_fraction: Option<f64>,
    /// File listing val image paths, one per line
    #[arg(long)]
    pub val_list: Option<PathBuf>,
}

impl SplitArgs {
    fn spec(&self) -> Result<SplitSpec, CliError> {
        if let Some(n) = self.val_count {
            return Ok(SplitSpec::ValCount(n));
        }
        if let Some(f) = self.val_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(CliError::Config(format!("--val-fraction {f} is outside [0, 1]")));
            }
            return Ok(SplitSpec::ValFraction(f));
        }
        if let Some(path) = &self.val_list {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let names = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect();
            return Ok(SplitSpec::ValList(names));
        }
        Ok(SplitSpec::AllTrain)
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Label Studio JSON export
    #[arg(long)]
    pub export: PathBuf,
    #[arg(long, env = "PCBCRM_IMAGES_DIR")]
    pub images_dir: Option<PathBuf>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConvertDirection {
    /// manifest -> label files
    ToYolo,
    /// label files + images -> manifest
    FromYolo,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum, default_value = "to-yolo")]
    pub direction: ConvertDirection,
    #[arg(long, env = "PCBCRM_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "PCBCRM_LABELS_DIR")]
    pub labels_dir: Option<PathBuf>,
    #[arg(long, env = "PCBCRM_IMAGES_DIR")]
    pub images_dir: Option<PathBuf>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, env = "PCBCRM_MANIFEST")]
    pub manifest: Option<PathBuf>,
    /// Also plan augmentation towards this per-class minimum
    #[arg(long)]
    pub target_min: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RoiArgs {
    #[arg(long, env = "PCBCRM_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "PCBCRM_IMAGES_DIR")]
    pub images_dir: Option<PathBuf>,
    /// Pixels added around the detected board
    #[arg(long, default_value_t = 0)]
    pub margin: u32,
    /// Contrast-stretch between two percentiles, e.g. `2,98`
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub contrast: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long, env = "PCBCRM_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "PCBCRM_IMAGES_DIR")]
    pub images_dir: Option<PathBuf>,
    /// Per-class minimum instance count in the train split
    #[arg(long)]
    pub target_min: u64,
    /// Comma-separated operations to draw from
    #[arg(long, value_delimiter = ',', default_value = "hflip,vflip,rot90,rot180,rot270")]
    pub ops: Vec<AugmentOp>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SplitChoice {
    Val,
    Train,
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, env = "PCBCRM_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "PCBCRM_DETECTIONS_DIR")]
    pub detections_dir: Option<PathBuf>,
    /// Extra IoU thresholds, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub iou_thresholds: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "val")]
    pub split: SplitChoice,
}

#[derive(Debug, Args)]
pub struct InventoryArgs {
    #[arg(long, env = "PCBCRM_DETECTIONS_DIR")]
    pub detections_dir: Option<PathBuf>,
    /// CRM mapping TOML (defaults to the built-in table)
    #[arg(long, env = "PCBCRM_MAPPING")]
    pub mapping: Option<PathBuf>,
    /// Minimum detection confidence counted
    #[arg(long, env = "PCBCRM_FLOOR")]
    pub floor: Option<f64>,
}

fn overlay(slot: &mut Option<PathBuf>, value: &Option<PathBuf>) {
    if value.is_some() {
        slot.clone_from(value);
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(ConfigFile::load(path)?),
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir.clone_from(dir);
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.lenient |= cli.lenient;
    match &cli.command {
        Command::Ingest(a) => overlay(&mut cfg.images_dir, &a.images_dir),
        Command::Convert(a) => {
            overlay(&mut cfg.manifest, &a.manifest);
            overlay(&mut cfg.labels_dir, &a.labels_dir);
            overlay(&mut cfg.images_dir, &a.images_dir);
        }
        Command::Stats(a) => overlay(&mut cfg.manifest, &a.manifest),
        Command::Roi(a) => {
            overlay(&mut cfg.manifest, &a.manifest);
            overlay(&mut cfg.images_dir, &a.images_dir);
        }
        Command::Augment(a) => {
            overlay(&mut cfg.manifest, &a.manifest);
            overlay(&mut cfg.images_dir, &a.images_dir);
        }
        Command::Eval(a) => {
            overlay(&mut cfg.manifest, &a.manifest);
            overlay(&mut cfg.detections_dir, &a.detections_dir);
            if let Some(t) = &a.iou_thresholds {
                cfg.iou_thresholds.clone_from(t);
            }
        }
        Command::Inventory(a) => {
            overlay(&mut cfg.detections_dir, &a.detections_dir);
            overlay(&mut cfg.mapping, &a.mapping);
            if let Some(f) = a.floor {
                cfg.confidence_floor = f;
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run a parsed command under an already-resolved configuration.
pub fn execute(cfg: &RunConfig, command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Ingest(a) => cmd_ingest(
            cfg,
            &IngestOptions {
                export: a.export.clone(),
                split: a.split.spec()?,
            },
        ),
        Command::Convert(a) => {
            let opts = match a.direction {
                ConvertDirection::ToYolo => ConvertOptions::ToYolo,
                ConvertDirection::FromYolo => ConvertOptions::FromYolo { split: a.split.spec()? },
            };
            cmd_convert(cfg, &opts)
        }
        Command::Stats(a) => cmd_stats(cfg, a.target_min),
        Command::Roi(a) => {
            let contrast = a.contrast.as_ref().map(|v| (v[0], v[1]));
            cmd_roi(
                cfg,
                &RoiOptions {
                    margin: a.margin,
                    contrast,
                },
            )
        }
        Command::Augment(a) => cmd_augment(
            cfg,
            &AugmentOptions {
                target_min: a.target_min,
                ops: a.ops.clone(),
            },
        ),
        Command::Eval(a) => {
            let split = match a.split {
                SplitChoice::Val => EvalSplit::Val,
                SplitChoice::Train => EvalSplit::Train,
                SplitChoice::All => EvalSplit::All,
            };
            cmd_eval(cfg, &EvalOptions { split })
        }
        Command::Inventory(_) => cmd_inventory(cfg),
    }
}

/// Parse `args` (including the program name), run the command and print
/// its messages. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve(&cli).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {} worker threads: {e}", cfg.jobs)))?;
        pool.install(|| execute(&cfg, &cli.command))
    });
    match result {
        Ok(outcome) => {
            for m in &outcome.messages {
                println!("{m}");
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for e in &outcome.errors {
                eprintln!("error: {e}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
