//! Sample-count presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::ModelSpec;
use crate::error::{Error, Result};

/// `Desk` keeps runs in the seconds-to-minutes range; `Paper` uses the full
/// sample counts of the reference experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Desk,
    Paper,
}

impl Preset {
    /// Parameter samples for a fingerprint: `200·|θ|` (desk) or
    /// `500·|θ|·2ⁿ·D` (paper).
    pub fn fingerprint_samples(self, spec: &ModelSpec) -> usize {
        match self {
            Preset::Desk => 200 * spec.param_count(),
            Preset::Paper => 500 * spec.param_count() * (1usize << spec.n) * spec.dims(),
        }
    }

    /// Fidelity pairs for expressibility: 5000 (desk) or half of
    /// `500·|θ|·2ⁿ` parameter samples (paper).
    pub fn expressibility_pairs(self, spec: &ModelSpec) -> usize {
        match self {
            Preset::Desk => 5000,
            Preset::Paper => 500 * spec.param_count() * (1usize << spec.n) / 2,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Desk => "desk",
            Preset::Paper => "paper",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::InvalidArgument(format!("unknown preset `{other}`"))),
        }
    }
}
