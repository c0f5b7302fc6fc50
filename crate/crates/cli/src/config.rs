use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use aisq::pipeline::PipelineConfig;
use aisq::tsnet::TrainConfig;

use crate::error::{CliError, CliResult};

pub const RUN_CONFIG_FILE: &str = "run_config.json";
pub const DATA_DIR_ENV: &str = "AISQ_DATA_DIR";

/// Geographic reference files. Missing entries fall back to
/// `$AISQ_DATA_DIR/{coastline,harbors,rivers}.csv`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeoFiles {
    pub coast: Option<PathBuf>,
    pub harbors: Option<PathBuf>,
    pub rivers: Option<PathBuf>,
    /// Thin the coastline to at most this many points.
    pub max_coast_points: Option<usize>,
}

/// Every setting a run depends on. Loaded from `--config`, overridden by
/// flags, and written back fully resolved next to the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    pub geo: GeoFiles,
    pub preset: String,
    pub train: TrainConfig,
    /// Reassembly window for multipart AIVDM messages, in sentences.
    pub fragment_window: u64,
    /// Worker threads; `None` uses every core. Results do not depend on it.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            geo: GeoFiles::default(),
            preset: "tiny_resnet".into(),
            train: TrainConfig::default(),
            fragment_window: aisq::ais::DEFAULT_FRAGMENT_WINDOW,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self).expect("config serializes");
        fs::write(path, json + "\n").map_err(|e| CliError::io(path, e))
    }

    /// Resolve the geo file paths against `$AISQ_DATA_DIR`. Coastline and
    /// harbors are required; the river file is used only if present.
    pub fn resolve_geo(&mut self, data_dir: Option<PathBuf>) -> CliResult<()> {
        let fallback = |name: &str| data_dir.as_ref().map(|d| d.join(name));
        if self.geo.coast.is_none() {
            self.geo.coast = fallback("coastline.csv");
        }
        if self.geo.harbors.is_none() {
            self.geo.harbors = fallback("harbors.csv");
        }
        if self.geo.rivers.is_none() {
            self.geo.rivers = fallback("rivers.csv").filter(|p| p.exists());
        }
        for (what, p) in [("coastline", &self.geo.coast), ("harbor", &self.geo.harbors)] {
            match p {
                None => {
                    return Err(CliError::Usage(format!(
                        "no {what} file: pass it explicitly or set {DATA_DIR_ENV}"
                    )))
                }
                Some(p) if !p.is_file() => {
                    return Err(CliError::Io(format!("{what} file {} not found", p.display())))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_fills_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"preset":"mlp_2x64","pipeline":{"seq_len":1080}}"#).unwrap();
        assert_eq!(c.preset, "mlp_2x64");
        assert_eq!(c.pipeline.seq_len, 1080);
        assert_eq!(c.pipeline.seed, PipelineConfig::default().seed);
        assert_eq!(c.train, TrainConfig::default());
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn missing_geo_without_data_dir_is_usage() {
        let mut c = RunConfig::default();
        assert!(matches!(c.resolve_geo(None), Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_harbor_file_names_path() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("coastline.csv"), "54,1\n").unwrap();
        let mut c = RunConfig::default();
        let err = c.resolve_geo(Some(dir.path().to_path_buf())).unwrap_err();
        assert!(matches!(&err, CliError::Io(m) if m.contains("harbors.csv")), "{err}");
    }
}
