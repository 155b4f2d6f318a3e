use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;

/// Settings file read by `--config`. Relative paths are resolved against
/// the directory holding the file. Command-line flags and `PCBCRM_*`
/// environment variables take precedence over every entry.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub manifest: Option<PathBuf>,
    pub images_dir: Option<PathBuf>,
    pub labels_dir: Option<PathBuf>,
    pub detections_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub iou_thresholds: Option<Vec<f64>>,
    pub confidence_floor: Option<f64>,
    pub lenient: Option<bool>,
    pub jobs: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.manifest,
            &mut cfg.images_dir,
            &mut cfg.labels_dir,
            &mut cfg.detections_dir,
            &mut cfg.output_dir,
            &mut cfg.mapping,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings for one command run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub images_dir: Option<PathBuf>,
    pub labels_dir: Option<PathBuf>,
    pub detections_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub mapping: Option<PathBuf>,
    pub iou_thresholds: Vec<f64>,
    pub confidence_floor: f64,
    pub lenient: bool,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            images_dir: None,
            labels_dir: None,
            detections_dir: None,
            output_dir: PathBuf::from("out"),
            mapping: None,
            iou_thresholds: Vec::new(),
            confidence_floor: 0.0,
            lenient: false,
            jobs: 1,
        }
    }
}

impl RunConfig {
    /// Layer a config file under the defaults.
    pub fn from_file(cfg: ConfigFile) -> Self {
        let d = Self::default();
        Self {
            manifest: cfg.manifest,
            images_dir: cfg.images_dir,
            labels_dir: cfg.labels_dir,
            detections_dir: cfg.detections_dir,
            output_dir: cfg.output_dir.unwrap_or(d.output_dir),
            mapping: cfg.mapping,
            iou_thresholds: cfg.iou_thresholds.unwrap_or(d.iou_thresholds),
            confidence_floor: cfg.confidence_floor.unwrap_or(d.confidence_floor),
            lenient: cfg.lenient.unwrap_or(d.lenient),
            jobs: cfg.jobs.unwrap_or(d.jobs),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.iou_thresholds.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(CliError::Config(format!("IoU threshold {t} is outside (0, 1)")));
        }
        if !(0.0..=1.0).contains(&self.confidence_floor) {
            return Err(CliError::Config(format!(
                "confidence floor {} is outside [0, 1]",
                self.confidence_floor
            )));
        }
        if self.jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn require<'a>(value: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, CliError> {
        value
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("missing required setting `{name}`")))
    }

    /// A required input path that must exist on disk.
    pub fn existing<'a>(value: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, CliError> {
        let path = Self::require(value, name)?;
        if !path.exists() {
            return Err(CliError::Input(format!("{name} {} does not exist", path.display())));
        }
        Ok(path)
    }
}
