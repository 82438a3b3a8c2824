//! Session configuration, read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use consol_core::grouping::{GroupingConfig, ScorerKind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    None,
    Lowercase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub input: PathBuf,
    pub key_column: String,
    pub target_columns: Vec<String>,
    /// Decisions per column.
    pub budget: usize,
    #[serde(default)]
    pub global_budget: Option<usize>,
    #[serde(default = "default_max_path_len")]
    pub max_path_len: usize,
    #[serde(default)]
    pub token_level: bool,
    #[serde(default = "one")]
    pub min_group_size: usize,
    #[serde(default = "default_exponent")]
    pub constant_score_exponent: f64,
    #[serde(default)]
    pub sample_threshold: Option<usize>,
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_max_value_len")]
    pub max_value_len: usize,
    /// Labeled value pairs for metrics.
    #[serde(default)]
    pub labels: Option<PathBuf>,
    /// Column the labels refer to; the first target column by default.
    #[serde(default)]
    pub labels_column: Option<String>,
    #[serde(default)]
    pub port: Option<u16>,
}

fn default_max_path_len() -> usize {
    6
}

fn one() -> usize {
    1
}

fn default_exponent() -> f64 {
    0.5
}

fn default_sample_size() -> usize {
    200
}

fn default_delimiter() -> char {
    ','
}

fn default_max_value_len() -> usize {
    256
}

impl SessionConfig {
    pub fn new(input: impl Into<PathBuf>, key_column: &str, target_columns: &[&str], budget: usize) -> Self {
        SessionConfig {
            input: input.into(),
            key_column: key_column.into(),
            target_columns: target_columns.iter().map(|c| c.to_string()).collect(),
            budget,
            global_budget: None,
            max_path_len: default_max_path_len(),
            token_level: false,
            min_group_size: 1,
            constant_score_exponent: default_exponent(),
            sample_threshold: None,
            sample_size: default_sample_size(),
            normalization: Normalization::None,
            seed: 0,
            delimiter: default_delimiter(),
            max_value_len: default_max_value_len(),
            labels: None,
            labels_column: None,
            port: None,
        }
    }

    /// Reads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config: SessionConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.input = base.join(&config.input);
        if let Some(labels) = &config.labels {
            config.labels = Some(base.join(labels));
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            bail!("budget must be at least 1");
        }
        if self.global_budget == Some(0) {
            bail!("global_budget must be at least 1");
        }
        if self.max_path_len < 1 {
            bail!("max_path_len must be at least 1");
        }
        if self.target_columns.is_empty() {
            bail!("no target columns");
        }
        if !self.delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character");
        }
        if !(self.constant_score_exponent.is_finite() && self.constant_score_exponent >= 0.0) {
            bail!("constant_score_exponent must be a non-negative number");
        }
        Ok(())
    }

    pub fn grouping(&self) -> GroupingConfig {
        GroupingConfig {
            max_path_len: Some(self.max_path_len),
            max_value_len: self.max_value_len,
            constant_score_exponent: self.constant_score_exponent,
            scorer: ScorerKind::Frequency,
            sample_threshold: self.sample_threshold,
            sample_size: self.sample_size,
            seed: self.seed,
            ..GroupingConfig::default()
        }
    }

    pub fn labels_column(&self) -> &str {
        self.labels_column.as_deref().unwrap_or(&self.target_columns[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c: SessionConfig = toml::from_str(
            r#"
            input = "a.csv"
            key_column = "id"
            target_columns = ["name"]
            budget = 5
            "#,
        )
        .unwrap();
        assert_eq!(c.max_path_len, 6);
        assert_eq!(c.min_group_size, 1);
        assert_eq!(c.normalization, Normalization::None);
        c.validate().unwrap();
        let mut bad = c.clone();
        bad.budget = 0;
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.max_path_len = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<SessionConfig, _> = toml::from_str(
            "input = \"a\"\nkey_column = \"k\"\ntarget_columns = [\"v\"]\nbudget = 1\nbudgett = 2\n",
        );
        assert!(r.is_err());
    }
}
