//! JSON run configuration with `synth` and `pipeline` sections.

use std::path::Path;

use drift_arbiter::{PipelineConfig, SynthConfig};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub synth: Option<SynthConfig>,
    #[serde(default)]
    pub pipeline: PipelineConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub p_threshold: Option<f64>,
    pub bound: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config {source}: {e}")))
    }

    pub fn synth(&self, overrides: &Overrides) -> Result<SynthConfig, CliError> {
        let mut synth = self
            .synth
            .clone()
            .ok_or_else(|| CliError::Usage("config has no `synth` section".into()))?;
        if let Some(seed) = overrides.seed {
            synth.seed = seed;
        }
        synth
            .validate()
            .map_err(|e| CliError::Usage(format!("synth: {e}")))?;
        Ok(synth)
    }

    pub fn pipeline(&self, overrides: &Overrides) -> Result<PipelineConfig, CliError> {
        let mut p = self.pipeline.clone();
        if let Some(seed) = overrides.seed {
            p.seed = seed;
        }
        if let Some(h) = overrides.horizon {
            p.horizon = h;
        }
        if let Some(t) = overrides.p_threshold {
            p.p_threshold = t;
        }
        if let Some(b) = overrides.bound {
            p.bound = b;
        }
        p.validate()
            .map_err(|e| CliError::Usage(format!("pipeline: {e}")))?;
        Ok(p)
    }
}
