//! Run configuration: JSON file values overridden by command-line flags,
//! resolved to concrete values and echoed back for reproducibility.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use qfm_core::fingerprint::CorrelationMode;
use qfm_core::{AnsatzKind, Axis, GradientMethod, ModelSpec, Preset};

/// One value or a list, so `"qubits": 4` and `"qubits": [2, 4]` both parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn many<T>(v: Vec<T>) -> Option<OneOrMany<T>> {
    (!v.is_empty()).then_some(OneOrMany::Many(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every configurable key. Absent keys take command defaults; the echo
/// written next to the outputs has every key the command used filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<OneOrMany<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<OneOrMany<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<OneOrMany<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<CorrelationMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<GradientMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_seeds: Option<OneOrMany<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_seeds: Option<OneOrMany<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex_targets: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

/// Flags shared by every subcommand. Lists are comma separated.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Ansatz name (YZY, YZY_ENTANGLING, HEA, C15..C19); a list for `experiment` and `bench`.
    #[arg(long, value_delimiter = ',')]
    pub ansatz: Vec<String>,
    /// Qubit count; a list for `bench`.
    #[arg(long, value_delimiter = ',')]
    pub qubits: Vec<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Input dimension; defaults to the number of axes.
    #[arg(long)]
    pub dims: Option<usize>,
    /// Encoding axis per input dimension, e.g. `Y` or `X,Y`.
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<String>,
    /// Parameter samples (fingerprints) or fidelity pairs (expressibility).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Histogram bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Use surrogate Gaussian coefficients instead of circuit sampling.
    #[arg(long)]
    pub surrogate: bool,
    /// Correlation of complex coefficients: `complex` or `split_re_im`.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<CorrelationMode>,
    /// Columns with lower sample variance are excluded from correlations.
    #[arg(long)]
    pub variance_floor: Option<f64>,
    /// Fidelity pairs for the expressibility column of `experiment`/`bench`.
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// `auto`, `finite_diff` or `param_shift`.
    #[arg(long, value_parser = parse_gradient)]
    pub gradient: Option<GradientMethod>,
    #[arg(long, value_delimiter = ',')]
    pub model_seeds: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub data_seeds: Vec<u64>,
    /// Fit complex-valued targets instead of real (Hermitian) ones.
    #[arg(long)]
    pub complex_targets: bool,
    /// Number of synthetic events when no `--input` is given.
    #[arg(long)]
    pub events: Option<usize>,
    /// Event CSV (E1,px1,py1,pz1,E2,px2,py2,pz2,leading_pt).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub batch: Option<usize>,
    /// Discretization points per input axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: qfm_core::Error| e.to_string())
}

fn parse_gradient(s: &str) -> std::result::Result<GradientMethod, String> {
    s.parse().map_err(|e: qfm_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<CorrelationMode, String> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "complex" => Ok(CorrelationMode::Complex),
        "split_re_im" | "split" => Ok(CorrelationMode::SplitReIm),
        other => Err(format!("unknown correlation mode `{other}`")),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Applies every flag that was given on top of `self`.
    pub fn merge_flags(mut self, a: &CommonArgs) -> Self {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = a.$field.clone() {
                    self.$field = Some(v);
                }
            };
        }
        macro_rules! set_list {
            ($field:ident) => {
                if let Some(v) = many(a.$field.clone()) {
                    self.$field = Some(v);
                }
            };
        }
        set_list!(ansatz);
        set_list!(qubits);
        set!(layers);
        set!(dims);
        set_list!(axes);
        set!(samples);
        set!(seed);
        set!(preset);
        set!(out);
        set!(format);
        set!(bins);
        set!(mode);
        set!(variance_floor);
        set!(pairs);
        set!(epochs);
        set!(lr);
        set!(gradient);
        set_list!(model_seeds);
        set_list!(data_seeds);
        set!(events);
        set!(input);
        set!(batch);
        set!(grid);
        if a.surrogate {
            self.surrogate = Some(true);
        }
        if a.complex_targets {
            self.complex_targets = Some(true);
        }
        self
    }

    pub fn ansatzes(&self, default: &[AnsatzKind]) -> Result<Vec<AnsatzKind>> {
        match &self.ansatz {
            None => Ok(default.to_vec()),
            Some(list) => list
                .to_vec()
                .iter()
                .map(|s| s.parse::<AnsatzKind>().map_err(anyhow::Error::from))
                .collect(),
        }
    }

    pub fn single_ansatz(&self, default: AnsatzKind) -> Result<AnsatzKind> {
        let list = self.ansatzes(&[default])?;
        match list.as_slice() {
            [a] => Ok(*a),
            _ => bail!("this command takes exactly one ansatz, got {}", list.len()),
        }
    }

    pub fn qubit_list(&self, default: &[usize]) -> Vec<usize> {
        self.qubits.as_ref().map(|q| q.to_vec()).unwrap_or_else(|| default.to_vec())
    }

    pub fn single_qubits(&self, default: usize) -> Result<usize> {
        match self.qubit_list(&[default]).as_slice() {
            [n] => Ok(*n),
            list => bail!("this command takes exactly one qubit count, got {}", list.len()),
        }
    }

    /// Encoding axes: explicit `axes`, else `Y` for one dimension and
    /// `X, Y` for two (one axis per dimension otherwise).
    pub fn axis_list(&self) -> Result<Vec<Axis>> {
        let axes: Vec<Axis> = match &self.axes {
            Some(list) => list
                .to_vec()
                .iter()
                .map(|s| s.parse::<Axis>().map_err(anyhow::Error::from))
                .collect::<Result<_>>()?,
            None => match self.dims.unwrap_or(1) {
                0 => bail!("dims must be at least 1"),
                1 => vec![Axis::Y],
                2 => vec![Axis::X, Axis::Y],
                d => vec![Axis::Y; d],
            },
        };
        if let Some(d) = self.dims {
            if d != axes.len() {
                bail!("dims = {d} but {} encoding axes given", axes.len());
            }
        }
        Ok(axes)
    }

    pub fn model_spec(&self, ansatz: AnsatzKind, n: usize) -> Result<ModelSpec> {
        Ok(ModelSpec::new(n, self.layers.unwrap_or(1), ansatz, self.axis_list()?)?)
    }

    /// Writes the resolved model keys back so the echo is complete.
    pub fn record_spec(&mut self, spec: &ModelSpec) {
        self.ansatz = Some(OneOrMany::One(spec.ansatz.name().to_string()));
        self.qubits = Some(OneOrMany::One(spec.n));
        self.layers = Some(spec.layers);
        self.dims = Some(spec.dims());
        self.axes = Some(OneOrMany::Many(spec.axes.iter().map(|a| a.to_string()).collect()));
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
