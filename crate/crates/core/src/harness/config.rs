use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{dimension, FourierCoefficients};
use crate::io::read_json;

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Where each trial's field comes from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FieldSource {
    /// A fresh random bounded real field per trial.
    #[default]
    Random,
    /// One fixed field loaded from a coefficients JSON file.
    File(PathBuf),
}

impl Serialize for FieldSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FieldSource::Random => s.serialize_str("random"),
            FieldSource::File(p) => s.serialize_str(&p.to_string_lossy()),
        }
    }
}

impl<'de> Deserialize<'de> for FieldSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == "random" {
            FieldSource::Random
        } else {
            FieldSource::File(PathBuf::from(s))
        })
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Monte Carlo experiment description, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub b_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub field_source: FieldSource,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_base_seed() -> u64 {
    DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        read_json(path).map_err(|e| match e {
            Error::Json(e) => Error::InvalidConfig(format!("{}: {e}", path.display())),
            other => other,
        })
    }

    /// Checks the invariants and loads a fixed field if one is configured.
    pub fn validate(&self) -> Result<Option<FourierCoefficients>> {
        if self.b_list.is_empty() {
            return Err(Error::InvalidConfig("b_list is empty".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("n_list is empty".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        let b_max = *self.b_list.iter().max().expect("non-empty");
        if let Some(&n) = self.n_list.iter().find(|&&n| n < dimension(b_max)) {
            return Err(Error::InvalidConfig(format!(
                "n = {n} is below 2b+1 = {} for b = {b_max}",
                dimension(b_max)
            )));
        }
        match &self.field_source {
            FieldSource::Random => Ok(None),
            FieldSource::File(path) => {
                let field: FourierCoefficients = read_json(path)
                    .map_err(|e| Error::InvalidConfig(format!("field {}: {e}", path.display())))?;
                if let Some(&b) = self.b_list.iter().find(|&&b| b < field.bandwidth()) {
                    return Err(Error::InvalidConfig(format!(
                        "b = {b} is below the field's bandwidth {}",
                        field.bandwidth()
                    )));
                }
                Ok(Some(field))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(b: Vec<usize>, n: Vec<usize>, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            b_list: b,
            n_list: n,
            trials,
            base_seed: 1,
            field_source: FieldSource::Random,
            output_dir: "out".into(),
        }
    }

    #[test]
    fn parses_json() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"b_list":[1,2],"n_list":[100],"trials":5,"base_seed":18446744073709551615,
                "field_source":"random","output_dir":"x"}"#,
        )
        .unwrap();
        assert_eq!(c.base_seed, u64::MAX);
        assert_eq!(c.field_source, FieldSource::Random);
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"b_list":[1],"n_list":[9],"trials":1,"field_source":"f.json"}"#).unwrap();
        assert_eq!(c.field_source, FieldSource::File("f.json".into()));
        assert_eq!(c.base_seed, DEFAULT_SEED);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"b_list":[1],"n_list":[9],"trials":1,"bogus":0}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(cfg(vec![1, 3], vec![7, 100], 1).validate().is_ok());
        assert!(cfg(vec![], vec![7], 1).validate().is_err());
        assert!(cfg(vec![1], vec![], 1).validate().is_err());
        assert!(cfg(vec![1], vec![7], 0).validate().is_err());
        assert!(cfg(vec![1, 3], vec![6, 100], 1).validate().is_err());
        let mut c = cfg(vec![1], vec![7], 1);
        c.field_source = FieldSource::File("/nonexistent/field.json".into());
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }
}
