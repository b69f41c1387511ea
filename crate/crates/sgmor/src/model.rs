//! TOML description of a mass-spring-damper network.
//!
//! ```toml
//! masses = [1.0, 1.0]
//! springs = [{ ends = [0, 1], value = 100.0 }, { ends = [1, 2], value = 100.0 }]
//! dampers = [{ ends = [0, 1], value = 1.0 }]
//! input_spring = 1
//! delta = 0.1
//! ```
//!
//! Endpoint 0 is the ground and endpoint `i >= 1` is mass `i`. Springs are
//! numbered from 1 in file order; `input_spring` selects the one through
//! which the excitation acts.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sgmor_core::msd::{Element, MsdConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub ends: [usize; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub masses: Vec<f64>,
    pub springs: Vec<ElementEntry>,
    #[serde(default)]
    pub dampers: Vec<ElementEntry>,
    /// 1-based.
    pub input_spring: usize,
    pub delta: f64,
}

impl From<&MsdConfig> for ModelFile {
    fn from(cfg: &MsdConfig) -> Self {
        let entries = |elems: &[Element]| {
            elems.iter().map(|e| ElementEntry { ends: [e.ends.0, e.ends.1], value: e.value }).collect()
        };
        Self {
            masses: cfg.masses.clone(),
            springs: entries(&cfg.springs),
            dampers: entries(&cfg.dampers),
            input_spring: cfg.input_spring + 1,
            delta: cfg.delta,
        }
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("model file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file is always serializable")
    }

    /// Validated network.
    pub fn to_config(&self) -> Result<MsdConfig> {
        let elements =
            |entries: &[ElementEntry]| entries.iter().map(|e| Element::new(e.ends[0], e.ends[1], e.value)).collect();
        let input_spring =
            self.input_spring.checked_sub(1).ok_or_else(|| CliError::Config("input_spring is 1-based".into()))?;
        let cfg = MsdConfig {
            masses: self.masses.clone(),
            springs: elements(&self.springs),
            dampers: elements(&self.dampers),
            input_spring,
            delta: self.delta,
        };
        cfg.validate().map_err(|e| CliError::Config(format!("model: {e}")))?;
        Ok(cfg)
    }
}
