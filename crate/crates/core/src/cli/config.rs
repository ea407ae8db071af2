use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::{ModelKind, TrainConfig};
use crate::corpus::{CorpusPaths, RelationFormat};
use crate::error::{Error, Result};
use crate::recognizers::RecognizerConfig;
use crate::treebank::ProductionMode;

/// Relative data paths resolve against this directory when it is set.
pub const DATA_ROOT_ENV: &str = "PDTB_LAB_DATA";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitChoice {
    /// Sections 2-21 / 22 / 23.
    #[default]
    Standard,
    /// Seeded 60/20/20 shuffle of the instances.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSource {
    /// Whitespace-separated text vectors. Without a path, seeded random
    /// vectors over the corpus vocabulary are used.
    pub path: Option<PathBuf>,
    pub dim: usize,
}

impl Default for EmbeddingSource {
    fn default() -> Self {
        EmbeddingSource { path: None, dim: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkedConfig {
    pub features: usize,
    pub alpha: f64,
    pub mode: ProductionMode,
}

impl Default for LinkedConfig {
    fn default() -> Self {
        LinkedConfig {
            features: 100,
            alpha: 1.0,
            mode: ProductionMode::InternalOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub relations: PathBuf,
    #[serde(default = "default_format")]
    pub format: RelationFormat,
    #[serde(default)]
    pub trees: Option<PathBuf>,
    #[serde(default)]
    pub raw: Option<PathBuf>,
}

fn default_format() -> RelationFormat {
    RelationFormat::JsonLines
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

fn default_model() -> ModelKind {
    ModelKind::Basic
}

/// One experiment, read from TOML and adjusted by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus: CorpusSection,
    #[serde(default)]
    pub embeddings: EmbeddingSource,
    #[serde(default)]
    pub split: SplitChoice,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub recognizer: RecognizerConfig,
    #[serde(default)]
    pub linked: LinkedConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    /// Read a config file; relative paths resolve against the data root
    /// variable when set, else against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(e).in_file(path))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.in_file(path))?;
        let base = match std::env::var_os(DATA_ROOT_ENV) {
            Some(root) => PathBuf::from(root),
            None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus.relations);
        self.corpus.trees.as_mut().map(fix);
        self.corpus.raw.as_mut().map(fix);
        self.embeddings.path.as_mut().map(fix);
    }

    pub fn corpus_paths(&self) -> CorpusPaths {
        CorpusPaths {
            relations: self.corpus.relations.clone(),
            format: self.corpus.format,
            trees: self.corpus.trees.clone(),
            raw: self.corpus.raw.clone(),
        }
    }

    /// Referenced paths exist and the training settings are coherent.
    pub fn validate(&self) -> Result<()> {
        let mut paths = vec![("relations", Some(&self.corpus.relations))];
        paths.push(("trees", self.corpus.trees.as_ref()));
        paths.push(("raw text", self.corpus.raw.as_ref()));
        paths.push(("embeddings", self.embeddings.path.as_ref()));
        for (what, p) in paths {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(Error::invalid(format!("{what} path {} does not exist", p.display())));
                }
            }
        }
        if self.embeddings.dim == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        self.train.validate()?;
        self.recognizer.validate()?;
        if self.linked.features == 0 || !(self.linked.alpha > 0.0) {
            return Err(Error::invalid("linked recognizer needs features > 0 and alpha > 0"));
        }
        Ok(())
    }

    /// The seed, required by every command that trains.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::invalid("this command trains a model and needs `seed` in the config or --seed"))
    }

    /// Copy the top-level seed into the training sections.
    pub fn seeded(mut self) -> Self {
        if let Some(s) = self.seed {
            self.train.seed = s;
            self.recognizer.seed = s;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::from_toml("[corpus]\nrelations = \"rel.jsonl\"\n").unwrap();
        assert_eq!(c.model, ModelKind::Basic);
        assert_eq!(c.train, TrainConfig::default());
        assert_eq!(c.linked.features, 100);
        assert!(c.require_seed().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("[corpus]\nrelations = \"r\"\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml("seed = 1\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::from_toml("seed = 7\nmodel = \"model2\"\n[corpus]\nrelations = \"r\"\n[train]\nlr = 0.01\n").unwrap();
        c.resolve_paths(Path::new("/data"));
        assert_eq!(c.corpus.relations, PathBuf::from("/data/r"));
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
        assert_eq!(c.seeded().train.seed, 7);
    }
}
