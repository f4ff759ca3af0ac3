//! Run configuration: one TOML file, with relative paths resolved against
//! the file's directory and selected keys overridable from the command line.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use serde::Deserialize;

use senseweave_core::{MockEmbedder, PipelineParams, SeedWordPolicy};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingConfig {
    /// Precomputed embeddings, `EMB1` binary or JSON lines.
    pub file: Option<PathBuf>,
    pub mock: Option<MockEmbedder>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    /// Raw documents as JSON lines.
    pub corpus: Vec<PathBuf>,
    /// Tab-separated rule table replacing the built-in preprocessing rules.
    pub rules: Option<PathBuf>,
    /// One candidate word per line.
    pub seed_words: Option<PathBuf>,
    pub workers: usize,
    pub synset_threshold: f64,
    pub wsd_threshold: f64,
    pub oversize_threshold: usize,
    /// RFC 3339 timestamp stored in exported resources.
    pub created_at: String,
    pub embedding: EmbeddingConfig,
    pub pipeline: PipelineParams,
    pub seed_policy: SeedWordPolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            corpus: Vec::new(),
            rules: None,
            seed_words: None,
            workers: 0,
            synset_threshold: senseweave_core::synset::DEFAULT_SYNSET_THRESHOLD,
            wsd_threshold: senseweave_core::wsd::DEFAULT_WSD_THRESHOLD,
            oversize_threshold: senseweave_core::synset::DEFAULT_OVERSIZE_THRESHOLD,
            created_at: "1970-01-01T00:00:00Z".into(),
            embedding: EmbeddingConfig::default(),
            pipeline: PipelineParams::default(),
            seed_policy: SeedWordPolicy::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve(base);
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output_dir);
        self.corpus.iter_mut().for_each(join);
        self.rules.iter_mut().for_each(join);
        self.seed_words.iter_mut().for_each(join);
        self.embedding.file.iter_mut().for_each(join);
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| -> Result<()> { Err(ConfigError(msg).into()) };
        if !(0.0..=2.0).contains(&self.synset_threshold) {
            return fail(format!("synset_threshold {} outside [0, 2]", self.synset_threshold));
        }
        if !(-1.0..=1.0).contains(&self.wsd_threshold) {
            return fail(format!("wsd_threshold {} outside [-1, 1]", self.wsd_threshold));
        }
        if self.oversize_threshold == 0 {
            return fail("oversize_threshold must be at least 1".into());
        }
        if let Some(mock) = &self.embedding.mock {
            if mock.dim == 0 {
                return fail("embedding.mock.dim must be at least 1".into());
            }
        }
        self.created_at()?;
        self.pipeline.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.seed_policy.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(())
    }

    pub fn created_at(&self) -> Result<DateTime<Utc>> {
        DateTime::parse_from_rfc3339(&self.created_at)
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| ConfigError(format!("created_at {:?}: {e}", self.created_at)).into())
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    pub fn mock(&self) -> Result<&MockEmbedder> {
        self.embedding
            .mock
            .as_ref()
            .ok_or_else(|| ConfigError("no [embedding.mock] section in config".into()).into())
    }
}

/// Fails with a config error unless `path` exists.
pub fn require(path: &Path, what: &str) -> Result<()> {
    if !path.exists() {
        bail!(ConfigError(format!("{what} not found: {}", path.display())));
    }
    Ok(())
}

pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_relative_paths() {
        let mut c: RunConfig = toml::from_str("corpus = [\"docs.jsonl\"]\n").unwrap();
        c.resolve(Path::new("/tmp/run"));
        assert_eq!(c.corpus[0], Path::new("/tmp/run/docs.jsonl"));
        assert_eq!(c.output_dir, Path::new("/tmp/run/out"));
        assert_eq!(c.pipeline, PipelineParams::default());
        c.validate().unwrap();
    }

    #[test]
    fn partial_pipeline_section() {
        let c: RunConfig = toml::from_str("[pipeline]\nmax_iterations = 50\n").unwrap();
        assert_eq!(c.pipeline.max_iterations, 50);
        assert_eq!(c.pipeline.step1, PipelineParams::default().step1);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_thresholds() {
        assert!(toml::from_str::<RunConfig>("colour = 1\n").is_err());
        let c: RunConfig = toml::from_str("synset_threshold = 3.0\n").unwrap();
        assert!(c.validate().is_err());
        let c: RunConfig = toml::from_str("created_at = \"yesterday\"\n").unwrap();
        assert!(c.validate().is_err());
    }
}
