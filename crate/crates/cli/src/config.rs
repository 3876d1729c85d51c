use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dynagrid::client::ModelHandle;
use dynagrid::eval::PromptTemplate;
use serde::{Deserialize, Serialize};

/// Contents of a `--config` TOML file. Every key is optional; flags override.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub scale: Option<f64>,
    pub n_train: Option<usize>,
    pub trials: Option<u32>,
    pub out: Option<PathBuf>,
    pub concurrency: Option<usize>,
    pub model: Option<String>,
    pub template: Option<PathBuf>,
    pub models: Vec<ModelHandle>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let mut ids: Vec<&str> = cfg.models.iter().map(|m| m.model_id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            bail!("model {} is configured twice", w[0]);
        }
        Ok(cfg)
    }

    pub fn model(&self, id: &str) -> Option<&ModelHandle> {
        self.models.iter().find(|m| m.model_id == id)
    }
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: u32 = 3;

pub fn default_concurrency() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Generation settings recorded in the manifest header. Output location and
/// worker count are left out: they do not change the dataset bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationConfig {
    pub master_seed: u64,
    pub scale: f64,
    pub n_train: usize,
}

pub fn load_template(path: Option<&Path>) -> Result<PromptTemplate> {
    let Some(path) = path else {
        return Ok(PromptTemplate::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading template {}", path.display()))?;
    let t: PromptTemplate = toml::from_str(&text).with_context(|| format!("parsing template {}", path.display()))?;
    if t.answer_instruction.contains("[[") {
        bail!("the answer instruction must not contain a grid literal");
    }
    Ok(t)
}
