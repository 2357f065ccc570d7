use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

/// Optional settings file; every key mirrors a flag of the same name.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub digits: Option<u32>,
    pub format: Option<String>,
    pub output: Option<String>,
    pub family: Option<String>,
    pub rho: Option<Scalar>,
    pub lambda: Option<Scalar>,
    pub a: Option<Scalar>,
    pub q: Option<Scalar>,
    pub c: Option<Scalar>,
    pub n: Option<i64>,
    pub threshold: Option<f64>,
    pub map: Option<String>,
    pub n0: Option<i64>,
    pub seed: Option<String>,
    pub alpha: Option<Scalar>,
    pub beta: Option<Scalar>,
    pub gamma: Option<Scalar>,
    pub delta: Option<Scalar>,
    pub which: Option<u8>,
    pub precisions: Option<Vec<u32>>,
}

/// A number written either bare or as a string such as `"1/2"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    pub fn text(&self) -> String {
        match self {
            Scalar::Int(v) => v.to_string(),
            Scalar::Float(v) => v.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Flag value if given, else the config value.
pub fn pick(flag: &Option<String>, config: &Option<Scalar>) -> Option<String> {
    flag.clone().or_else(|| config.as_ref().map(Scalar::text))
}
