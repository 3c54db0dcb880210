//! MSE training with Adam and the seed-grid experiment runner.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{AnsatzKind, CompiledModel, ModelSpec};
use crate::error::{Error, Result};
use crate::expressibility::{expressibility, DEFAULT_BINS};
use crate::fingerprint::{fcc, pearson_matrix, sample_coefficients, weighted_fcc, Weighting};
use crate::fourier_data::{make_dataset, random_complex_target, random_target, RegressionDataset};
use crate::seed::{self, Role};
use crate::spectral::{model_coefficients, CoefficientTensor};
use crate::statevec::Axis;

pub const FINITE_DIFF_STEP: f64 = 1e-5;

/// Mean of `(f(x, θ) − y)²` over the dataset; complex targets add `Im(y)²`.
pub fn mse_loss(spec: &ModelSpec, theta: &[f64], data: &RegressionDataset) -> Result<f64> {
    let model = CompiledModel::new(spec, theta)?;
    mse_of(&model, data)
}

fn mse_of(model: &CompiledModel, data: &RegressionDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    let preds = model.evaluate_many(&data.inputs)?;
    Ok(residual_sum(&preds, data) / data.len() as f64)
}

fn residual_sum(preds: &[f64], data: &RegressionDataset) -> f64 {
    let real: f64 = preds.iter().zip(&data.targets).map(|(p, y)| (p - y).powi(2)).sum();
    let imag: f64 = data.targets_imag.iter().flatten().map(|v| v * v).sum();
    real + imag
}

/// `Σ_ω |c_ω(θ) − ĉ_ω|²` over the union of both bands.
pub fn coefficient_loss(spec: &ModelSpec, theta: &[f64], target: &CoefficientTensor) -> Result<f64> {
    let c = model_coefficients(spec, theta)?;
    let band = c.band().max(target.band());
    let (a, b) = (c.truncate(band)?, target.truncate(band)?);
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Parameter shift where the ansatz allows it, finite differences otherwise.
    #[default]
    Auto,
    FiniteDiff,
    ParamShift,
}

impl GradientMethod {
    /// Concrete method for `ansatz`; errors for parameter shift on ansatzes
    /// with gates outside its two-eigenvalue form.
    pub fn resolve(self, ansatz: AnsatzKind) -> Result<GradientMethod> {
        match self {
            GradientMethod::Auto if ansatz.supports_param_shift() => Ok(GradientMethod::ParamShift),
            GradientMethod::Auto => Ok(GradientMethod::FiniteDiff),
            GradientMethod::ParamShift if !ansatz.supports_param_shift() => {
                Err(Error::ParamShiftUnsupported(ansatz.name().into()))
            }
            m => Ok(m),
        }
    }
}

impl FromStr for GradientMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "auto" => Ok(GradientMethod::Auto),
            "finite_diff" | "fd" => Ok(GradientMethod::FiniteDiff),
            "param_shift" | "ps" => Ok(GradientMethod::ParamShift),
            other => Err(Error::InvalidArgument(format!("unknown gradient method `{other}`"))),
        }
    }
}

/// Outputs at `points` for `θ + δ·e_k` and `θ − δ·e_k`.
fn shifted_outputs<P: AsRef<[f64]>>(
    spec: &ModelSpec,
    theta: &[f64],
    k: usize,
    delta: f64,
    points: &[P],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut t = theta.to_vec();
    t[k] = theta[k] + delta;
    let plus = CompiledModel::new(spec, &t)?.evaluate_many(points)?;
    t[k] = theta[k] - delta;
    let minus = CompiledModel::new(spec, &t)?.evaluate_many(points)?;
    Ok((plus, minus))
}

/// `∂f(x, θ)/∂θ_k` at each point of `points`, per parameter.
pub fn output_jacobian<P: AsRef<[f64]>>(
    spec: &ModelSpec,
    theta: &[f64],
    points: &[P],
    method: GradientMethod,
) -> Result<Vec<Vec<f64>>> {
    spec.check_params(theta)?;
    let (delta, scale) = match method.resolve(spec.ansatz)? {
        GradientMethod::ParamShift => (FRAC_PI_2, 0.5),
        _ => (FINITE_DIFF_STEP, 0.5 / FINITE_DIFF_STEP),
    };
    (0..theta.len())
        .map(|k| {
            let (plus, minus) = shifted_outputs(spec, theta, k, delta, points)?;
            Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) * scale).collect())
        })
        .collect()
}

/// Gradient of [`mse_loss`] with respect to `θ`.
pub fn gradient(
    spec: &ModelSpec,
    theta: &[f64],
    data: &RegressionDataset,
    method: GradientMethod,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    let preds = CompiledModel::new(spec, theta)?.evaluate_many(&data.inputs)?;
    let jac = output_jacobian(spec, theta, &data.inputs, method)?;
    let n = data.len() as f64;
    Ok(jac
        .iter()
        .map(|dk| {
            dk.iter()
                .zip(preds.iter().zip(&data.targets))
                .map(|(d, (p, y))| 2.0 * (p - y) * d)
                .sum::<f64>()
                / n
        })
        .collect())
}

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(dim: usize, lr: f64) -> Self {
        AdamState { m: vec![0.0; dim], v: vec![0.0; dim], t: 0, lr, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    pub fn step(&mut self, grad: &[f64], theta: &mut [f64]) -> Result<()> {
        if grad.len() != self.m.len() || theta.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                got: if grad.len() != self.m.len() { grad.len() } else { theta.len() },
            });
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..grad.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            theta[i] -= self.lr * mh / (vh.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub gradient: GradientMethod,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 1000, lr: 0.01, gradient: GradientMethod::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    /// Loss before each update, one entry per epoch.
    pub history: Vec<f64>,
    pub theta: Vec<f64>,
    pub initial_mse: f64,
    pub final_mse: f64,
    pub model_seed: u64,
    pub data_seed: u64,
}

/// Initial parameters for `model_seed`: `U[0, 2π)`.
pub fn initial_params(spec: &ModelSpec, model_seed: u64) -> Vec<f64> {
    spec.random_params(&mut seed::stream(model_seed, Role::ModelInit, 0))
}

/// Full-batch Adam on the MSE.
pub fn train(
    spec: &ModelSpec,
    data: &RegressionDataset,
    config: &TrainConfig,
    model_seed: u64,
) -> Result<TrainResult> {
    train_from(spec, data, config, initial_params(spec, model_seed), model_seed)
}

pub fn train_from(
    spec: &ModelSpec,
    data: &RegressionDataset,
    config: &TrainConfig,
    mut theta: Vec<f64>,
    model_seed: u64,
) -> Result<TrainResult> {
    if config.epochs == 0 {
        return Err(Error::InvalidArgument("epochs must be at least 1".into()));
    }
    if !(config.lr > 0.0) {
        return Err(Error::InvalidArgument(format!("learning rate {} must be positive", config.lr)));
    }
    if data.dims != spec.dims() {
        return Err(Error::DimensionMismatch { expected: spec.dims(), got: data.dims });
    }
    let method = config.gradient.resolve(spec.ansatz)?;
    let mut adam = AdamState::new(theta.len(), config.lr);
    let mut history = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        history.push(mse_loss(spec, &theta, data)?);
        let g = gradient(spec, &theta, data, method)?;
        adam.step(&g, &mut theta)?;
    }
    let final_mse = mse_loss(spec, &theta, data)?;
    Ok(TrainResult {
        initial_mse: history[0],
        history,
        theta,
        final_mse,
        model_seed,
        data_seed: data.seed,
    })
}

/// Settings of a seed-grid experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub ansatzes: Vec<AnsatzKind>,
    pub n: usize,
    pub layers: usize,
    pub axes: Vec<Axis>,
    pub model_seeds: Vec<u64>,
    pub data_seeds: Vec<u64>,
    pub train: TrainConfig,
    /// Parameter samples for the fingerprint metrics; `0` skips them.
    pub fingerprint_samples: usize,
    /// Fidelity pairs for expressibility; `0` skips it.
    pub expressibility_pairs: usize,
    pub bins: usize,
    /// Master seed of the metric sampling.
    pub seed: u64,
    /// Fit complex-valued targets (no Hermitian symmetrization).
    #[serde(default)]
    pub complex_targets: bool,
}

impl GridConfig {
    pub fn new(ansatzes: Vec<AnsatzKind>, n: usize, layers: usize, axes: Vec<Axis>) -> Self {
        GridConfig {
            ansatzes,
            n,
            layers,
            axes,
            model_seeds: vec![0, 1, 2],
            data_seeds: vec![0, 1, 2],
            train: TrainConfig::default(),
            fingerprint_samples: 0,
            expressibility_pairs: 0,
            bins: DEFAULT_BINS,
            seed: 0,
            complex_targets: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub ansatz: AnsatzKind,
    pub model_seed: u64,
    pub data_seed: u64,
    pub initial_mse: f64,
    pub final_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub ansatz: AnsatzKind,
    pub n: usize,
    pub layers: usize,
    pub dims: usize,
    pub mean_mse: f64,
    /// Spread over data seeds of the per-data-seed mean MSE.
    pub std_mse: f64,
    pub fcc: Option<f64>,
    pub weighted_fcc: Option<f64>,
    pub expressibility_kl: Option<f64>,
    pub samples: usize,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTable {
    pub config: GridConfig,
    pub rows: Vec<GridRow>,
    pub runs: Vec<RunRecord>,
}

fn population_std(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Dataset used for `data_seed` in a grid.
pub fn grid_dataset(spec: &ModelSpec, data_seed: u64, complex: bool) -> Result<RegressionDataset> {
    let band = spec.max_frequency();
    let target = if complex {
        random_complex_target(band, spec.dims(), data_seed)?
    } else {
        random_target(band, spec.dims(), data_seed)?
    };
    make_dataset(&target)
}

/// Trains every `(ansatz, model_seed, data_seed)` combination and attaches
/// the per-ansatz metrics.
pub fn experiment_grid(config: &GridConfig) -> Result<GridTable> {
    if config.ansatzes.is_empty() || config.model_seeds.is_empty() || config.data_seeds.is_empty() {
        return Err(Error::InvalidArgument("ansatz and seed lists must be nonempty".into()));
    }
    let specs = config
        .ansatzes
        .iter()
        .map(|&a| ModelSpec::new(config.n, config.layers, a, config.axes.clone()))
        .collect::<Result<Vec<_>>>()?;
    let datasets = config
        .data_seeds
        .iter()
        .map(|&s| grid_dataset(&specs[0], s, config.complex_targets))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize, u64)> = (0..specs.len())
        .flat_map(|a| {
            (0..datasets.len())
                .flat_map(move |d| config.model_seeds.iter().map(move |&m| (a, d, m)))
        })
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(a, d, m)| {
            let r = train(&specs[a], &datasets[d], &config.train, m)?;
            Ok(RunRecord {
                ansatz: specs[a].ansatz,
                model_seed: m,
                data_seed: config.data_seeds[d],
                initial_mse: r.initial_mse,
                final_mse: r.final_mse,
            })
        })
        .collect::<Result<Vec<RunRecord>>>()?;

    let per_ansatz = config.model_seeds.len() * config.data_seeds.len();
    let rows = specs
        .iter()
        .zip(runs.chunks(per_ansatz))
        .map(|(spec, chunk)| {
            let mses: Vec<f64> = chunk.iter().map(|r| r.final_mse).collect();
            let data_means: Vec<f64> = mses
                .chunks(config.model_seeds.len())
                .map(|c| c.iter().sum::<f64>() / c.len() as f64)
                .collect();
            let (fcc_v, wfcc) = if config.fingerprint_samples >= 2 {
                let s = sample_coefficients(spec, config.fingerprint_samples, config.seed)?;
                let fp = pearson_matrix(&s)?;
                (Some(fcc(&fp)?), Some(weighted_fcc(&fp, Weighting::InverseLinear)?))
            } else {
                (None, None)
            };
            let kl = if config.expressibility_pairs > 0 {
                Some(expressibility(spec, config.expressibility_pairs, config.bins, config.seed)?.kl)
            } else {
                None
            };
            Ok(GridRow {
                ansatz: spec.ansatz,
                n: spec.n,
                layers: spec.layers,
                dims: spec.dims(),
                mean_mse: mses.iter().sum::<f64>() / mses.len() as f64,
                std_mse: population_std(&data_means),
                fcc: fcc_v,
                weighted_fcc: wfcc,
                expressibility_kl: kl,
                samples: config.fingerprint_samples,
                runs: mses.len(),
            })
        })
        .collect::<Result<Vec<GridRow>>>()?;
    Ok(GridTable { config: config.clone(), rows, runs })
}

impl GridTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "ansatz",
            "n",
            "L",
            "D",
            "mean_mse",
            "std_mse",
            "fcc",
            "weighted_fcc",
            "expressibility_kl",
            "samples",
            "seeds",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let seeds = format!("{}x{}", self.config.model_seeds.len(), self.config.data_seeds.len());
        for r in &self.rows {
            w.write_record(&[
                r.ansatz.name().to_string(),
                r.n.to_string(),
                r.layers.to_string(),
                r.dims.to_string(),
                format!("{:e}", r.mean_mse),
                format!("{:e}", r.std_mse),
                opt(r.fcc),
                opt(r.weighted_fcc),
                opt(r.expressibility_kl),
                r.samples.to_string(),
                seeds.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
