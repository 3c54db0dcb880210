//! Two-particle collision events: feature derivation, quantile transform,
//! discretization, target scaling, the composite MSE + KL loss and a
//! mini-batch training driver. A synthetic event generator stands in for
//! external data.

use std::f64::consts::TAU;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{AnsatzKind, CompiledModel, ModelSpec};
use crate::error::{Error, Result};
use crate::seed::{self, Role};
use crate::spectral::make_input_grid;
use crate::statevec::Axis;
use crate::trainer::{initial_params, output_jacobian, AdamState, GradientMethod};

/// Weight of the histogram KL term in [`hep_loss`].
pub const KL_WEIGHT: f64 = 0.001;
pub const KL_BINS: usize = 32;
/// Floor applied to prediction bin probabilities before the log.
pub const PROB_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    #[serde(rename = "E1")]
    pub e1: f64,
    pub px1: f64,
    pub py1: f64,
    pub pz1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    pub px2: f64,
    pub py2: f64,
    pub pz2: f64,
    pub leading_pt: f64,
}

impl EventRecord {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.e1, self.px1, self.py1, self.pz1, self.e2, self.px2, self.py2, self.pz2,
            self.leading_pt,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedEvent("non-finite field".into()));
        }
        if self.e1 <= 0.0 || self.e2 <= 0.0 {
            return Err(Error::MalformedEvent(format!(
                "energies must be positive, got {} and {}",
                self.e1, self.e2
            )));
        }
        derive_features(self).map(|_| ())
    }
}

/// `(E_CM, E_Δ)` with `E_CM = √((E₁+E₂)² − (pz₁+pz₂)²)`, `E_Δ = |E₁ − E₂|`.
pub fn derive_features(e: &EventRecord) -> Result<(f64, f64)> {
    let es = e.e1 + e.e2;
    let pz = e.pz1 + e.pz2;
    let radicand = es * es - pz * pz;
    // Massless beams give a radicand that can round slightly negative.
    if radicand < -1e-9 * es * es || !radicand.is_finite() {
        return Err(Error::MalformedEvent(format!("negative invariant mass squared {radicand}")));
    }
    Ok((radicand.max(0.0).sqrt(), (e.e1 - e.e2).abs()))
}

pub fn read_events_csv<R: Read>(reader: R) -> Result<Vec<EventRecord>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let events = r.deserialize().collect::<std::result::Result<Vec<EventRecord>, _>>()?;
    for (i, e) in events.iter().enumerate() {
        e.validate()
            .map_err(|err| Error::MalformedEvent(format!("row {}: {err}", i + 1)))?;
    }
    Ok(events)
}

pub fn write_events_csv<W: Write>(writer: W, events: &[EventRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for e in events {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

/// Head-on massless beams along z with log-uniform energies in [20, 2000].
/// `leading_pt = 0.35·E_CM·u·(1 − 0.2·E_Δ/(E₁+E₂))`, `u ~ U[0.85, 1.15]`.
pub fn generate_synthetic_events(count: usize, seed: u64) -> Result<Vec<EventRecord>> {
    if count == 0 {
        return Err(Error::InvalidArgument("event count must be at least 1".into()));
    }
    let (lo, hi) = (20f64.ln(), 2000f64.ln());
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(seed, Role::HepEvents, i);
            let e1 = rng.random_range(lo..hi).exp();
            let e2 = rng.random_range(lo..hi).exp();
            let ecm = 2.0 * (e1 * e2).sqrt();
            let asym = (e1 - e2).abs() / (e1 + e2);
            let u = rng.random_range(0.85..1.15);
            EventRecord {
                e1,
                px1: 0.0,
                py1: 0.0,
                pz1: e1,
                e2,
                px2: 0.0,
                py2: 0.0,
                pz2: -e2,
                leading_pt: 0.35 * ecm * u * (1.0 - 0.2 * asym),
            }
        })
        .collect())
}

/// Maps values to `[0, 2π)` through the empirical CDF of the fitted sample:
/// the `i`-th smallest reference value goes to `2πi/N`, with linear
/// interpolation in between and clamping outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTransformer {
    sorted: Vec<f64>,
}

impl QuantileTransformer {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite feature value".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        if sorted.len() < 2 || sorted[0] == sorted[sorted.len() - 1] {
            return Err(Error::Degenerate("quantile transform needs two distinct values".into()));
        }
        Ok(QuantileTransformer { sorted })
    }

    pub fn transform(&self, v: f64) -> f64 {
        let n = self.sorted.len();
        let step = TAU / n as f64;
        // Last index with sorted[i] ≤ v.
        let upper = self.sorted.partition_point(|&s| s <= v);
        if upper == 0 {
            return 0.0;
        }
        let i = upper - 1;
        if i == n - 1 {
            return step * i as f64;
        }
        let (a, b) = (self.sorted[i], self.sorted[i + 1]);
        step * (i as f64 + (v - a) / (b - a))
    }

    pub fn transform_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.transform(v)).collect()
    }
}

/// Index of the grid point `2πk/K` nearest to `value`, wrapping at `2π`.
pub fn grid_index(value: f64, k: usize) -> usize {
    let i = (value * k as f64 / TAU).round() as i64;
    i.rem_euclid(k as i64) as usize
}

/// Snaps `value` to the nearest of the `K` points `2πk/K`.
pub fn discretize(value: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("grid size {k} below 2")));
    }
    Ok(TAU * grid_index(value, k) as f64 / k as f64)
}

/// Affine map of `[min, max]` onto `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: f64,
    pub max: f64,
}

impl MinMaxScaler {
    pub fn fit(values: &[f64]) -> Result<Self> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Degenerate(format!("target range [{min}, {max}] is empty")));
        }
        Ok(MinMaxScaler { min, max })
    }

    pub fn scale(&self, v: f64) -> f64 {
        2.0 * (v - self.min) / (self.max - self.min) - 1.0
    }

    pub fn inverse(&self, s: f64) -> f64 {
        (s + 1.0) * 0.5 * (self.max - self.min) + self.min
    }
}

fn histogram(values: &[f64], bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for &v in values {
        let b = (((v.clamp(-1.0, 1.0) + 1.0) * 0.5 * bins as f64) as usize).min(bins - 1);
        h[b] += 1.0;
    }
    let n = values.len() as f64;
    h.iter_mut().for_each(|c| *c /= n);
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HepLoss {
    pub mse: f64,
    pub kl: f64,
    pub total: f64,
}

/// `MSE + 0.001·KL(target ‖ prediction)` with both distributions binned on
/// `bins` uniform bins over `[−1, 1]`.
pub fn hep_loss(pred: &[f64], target: &[f64], bins: usize) -> Result<HepLoss> {
    if pred.len() != target.len() {
        return Err(Error::DimensionMismatch { expected: target.len(), got: pred.len() });
    }
    if bins < 1 || pred.len() < bins {
        return Err(Error::InvalidArgument(format!(
            "{} values are fewer than {bins} bins",
            pred.len()
        )));
    }
    let mse = pred.iter().zip(target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / pred.len() as f64;
    let p = histogram(target, bins);
    let q = histogram(pred, bins);
    let kl: f64 = p
        .iter()
        .zip(&q)
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &q)| p * (p / q.max(PROB_FLOOR)).ln())
        .sum();
    let kl = kl.max(0.0);
    Ok(HepLoss { mse, kl, total: mse + KL_WEIGHT * kl })
}

/// Mean Huber loss: `r²/2` for `|r| ≤ δ`, `δ(|r| − δ/2)` above.
pub fn huber_metric(pred: &[f64], target: &[f64], delta: f64) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::DimensionMismatch { expected: target.len(), got: pred.len() });
    }
    if pred.is_empty() {
        return Err(Error::InvalidArgument("empty input".into()));
    }
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| {
            let r = (p - t).abs();
            if r <= delta {
                0.5 * r * r
            } else {
                delta * (r - 0.5 * delta)
            }
        })
        .sum();
    Ok(sum / pred.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HepConfig {
    pub ansatz: AnsatzKind,
    pub n: usize,
    pub layers: usize,
    /// Number of synthetic events when no input file is given.
    pub events: usize,
    /// Train, validation and test fractions.
    pub split: [f64; 3],
    /// Discretization points per axis; defaults to `2nL + 1`.
    pub k: Option<usize>,
    pub batch: usize,
    pub epochs: usize,
    pub lr: f64,
    pub bins: usize,
    pub gradient: GradientMethod,
    pub seed: u64,
    pub model_seed: u64,
}

impl Default for HepConfig {
    fn default() -> Self {
        HepConfig {
            ansatz: AnsatzKind::C15,
            n: 4,
            layers: 1,
            events: 5000,
            split: [0.8, 0.1, 0.1],
            k: None,
            batch: 256,
            epochs: 20,
            lr: 0.005,
            bins: KL_BINS,
            gradient: GradientMethod::FiniteDiff,
            seed: 0,
            model_seed: 0,
        }
    }
}

impl HepConfig {
    /// Two-dimensional model: `E_CM` on an X encoding, `E_Δ` on Y.
    pub fn spec(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.n, self.layers, self.ansatz, vec![Axis::X, Axis::Y])
    }

    pub fn grid_size(&self) -> usize {
        self.k.unwrap_or(2 * self.n * self.layers + 1)
    }

    fn validate(&self) -> Result<()> {
        if self.split.iter().any(|&r| !(0.0..=1.0).contains(&r))
            || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidArgument(format!("split {:?} must sum to 1", self.split)));
        }
        if self.batch == 0 || self.epochs == 0 || !(self.lr > 0.0) || self.bins == 0 {
            return Err(Error::InvalidArgument("batch, epochs, lr and bins must be positive".into()));
        }
        let need = 2 * self.n * self.layers + 1;
        if self.grid_size() < need {
            return Err(Error::Aliasing { k: self.grid_size(), band: self.n * self.layers, need });
        }
        Ok(())
    }
}

/// One split: grid cell index per event, scaled target, raw target.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HepSplit {
    pub cells: Vec<usize>,
    pub targets: Vec<f64>,
    pub raw_pt: Vec<f64>,
}

impl HepSplit {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Transformed and split events.
#[derive(Debug, Clone, PartialEq)]
pub struct HepData {
    pub k: usize,
    pub ecm: QuantileTransformer,
    pub edelta: QuantileTransformer,
    pub scaler: MinMaxScaler,
    pub train: HepSplit,
    pub val: HepSplit,
    pub test: HepSplit,
    /// Continuous transformed training features before discretization.
    pub train_features: Vec<[f64; 2]>,
}

/// Shuffles with the split stream, partitions 80/10/10 (by default), fits
/// the transforms on the training part and applies them everywhere.
pub fn prepare(events: &[EventRecord], config: &HepConfig) -> Result<HepData> {
    config.validate()?;
    let feats = events
        .par_iter()
        .map(|e| {
            e.validate()?;
            derive_features(e)
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.shuffle(&mut seed::stream(config.seed, Role::HepSplit, 0));
    let n_train = (config.split[0] * events.len() as f64).round() as usize;
    let n_val = (config.split[1] * events.len() as f64).round() as usize;
    let n_val = n_val.min(events.len() - n_train);
    let (tr, rest) = order.split_at(n_train);
    let (va, te) = rest.split_at(n_val);
    if tr.len() < 2 {
        return Err(Error::InvalidArgument("training split needs at least 2 events".into()));
    }

    let ecm = QuantileTransformer::fit(&tr.iter().map(|&i| feats[i].0).collect::<Vec<_>>())?;
    let edelta = QuantileTransformer::fit(&tr.iter().map(|&i| feats[i].1).collect::<Vec<_>>())?;
    let scaler = MinMaxScaler::fit(&tr.iter().map(|&i| events[i].leading_pt).collect::<Vec<_>>())?;
    let k = config.grid_size();

    let build = |idx: &[usize]| HepSplit {
        cells: idx
            .iter()
            .map(|&i| {
                let x = grid_index(ecm.transform(feats[i].0), k);
                let y = grid_index(edelta.transform(feats[i].1), k);
                x * k + y
            })
            .collect(),
        targets: idx.iter().map(|&i| scaler.scale(events[i].leading_pt)).collect(),
        raw_pt: idx.iter().map(|&i| events[i].leading_pt).collect(),
    };
    let train_features = tr
        .iter()
        .map(|&i| [ecm.transform(feats[i].0), edelta.transform(feats[i].1)])
        .collect();
    Ok(HepData {
        k,
        train: build(tr),
        val: build(va),
        test: build(te),
        ecm,
        edelta,
        scaler,
        train_features,
    })
}

/// Model outputs on every grid cell, row-major.
fn cell_outputs(spec: &ModelSpec, theta: &[f64], k: usize) -> Result<Vec<f64>> {
    let grid = make_input_grid(spec.max_frequency(), 2, Some(k))?;
    CompiledModel::new(spec, theta)?.evaluate_many(grid.points())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMetrics {
    pub events: usize,
    pub mse: f64,
    pub kl: f64,
    pub loss: f64,
    pub huber: f64,
    /// Mean and standard deviation of `|pred − truth|` in pT units.
    pub abs_error_mean: f64,
    pub abs_error_std: f64,
}

fn split_metrics(outputs: &[f64], split: &HepSplit, scaler: &MinMaxScaler, bins: usize) -> Result<SplitMetrics> {
    let pred: Vec<f64> = split.cells.iter().map(|&c| outputs[c]).collect();
    let loss = hep_loss(&pred, &split.targets, bins)?;
    let errs: Vec<f64> = pred
        .iter()
        .zip(&split.raw_pt)
        .map(|(&p, &t)| (scaler.inverse(p) - t).abs())
        .collect();
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    let std = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / errs.len() as f64).sqrt();
    Ok(SplitMetrics {
        events: split.len(),
        mse: loss.mse,
        kl: loss.kl,
        loss: loss.total,
        huber: huber_metric(&pred, &split.targets, 1.0)?,
        abs_error_mean: mean,
        abs_error_std: std,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HepReport {
    pub config: HepConfig,
    pub initial_val_loss: f64,
    pub final_val_loss: f64,
    /// Validation loss after each epoch.
    pub val_history: Vec<f64>,
    pub val: SplitMetrics,
    pub test: SplitMetrics,
    pub scaler: MinMaxScaler,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HepOutcome {
    pub report: HepReport,
    /// `(predicted pT, true pT)` on the test split.
    pub test_predictions: Vec<(f64, f64)>,
}

/// Mini-batch Adam on the scaled target. Inputs are discretized, so model
/// outputs and their parameter derivatives are evaluated once per step on
/// the `K²` grid cells and looked up per event. The KL term is piecewise
/// constant in the predictions, so only the MSE part contributes to the
/// gradient.
pub fn train_hep(events: &[EventRecord], config: &HepConfig) -> Result<HepOutcome> {
    let data = prepare(events, config)?;
    train_prepared(&data, config)
}

pub fn train_prepared(data: &HepData, config: &HepConfig) -> Result<HepOutcome> {
    let spec = config.spec()?;
    if data.val.len() < config.bins || data.test.len() < config.bins {
        return Err(Error::InvalidArgument(format!(
            "validation and test splits need at least {} events",
            config.bins
        )));
    }
    let grid = make_input_grid(spec.max_frequency(), 2, Some(data.k))?;
    let mut theta = initial_params(&spec, config.model_seed);
    let mut adam = AdamState::new(theta.len(), config.lr);
    let val_loss = |theta: &[f64]| -> Result<f64> {
        let out = cell_outputs(&spec, theta, data.k)?;
        let pred: Vec<f64> = data.val.cells.iter().map(|&c| out[c]).collect();
        Ok(hep_loss(&pred, &data.val.targets, config.bins)?.total)
    };
    let initial_val_loss = val_loss(&theta)?;
    let mut val_history = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut seed::stream(config.seed, Role::HepBatch, epoch as u64));
        for batch in order.chunks(config.batch) {
            let out = CompiledModel::new(&spec, &theta)?.evaluate_many(grid.points())?;
            let jac = output_jacobian(&spec, &theta, grid.points(), config.gradient)?;
            let nb = batch.len() as f64;
            let grad: Vec<f64> = jac
                .iter()
                .map(|dk| {
                    batch
                        .iter()
                        .map(|&i| {
                            let c = data.train.cells[i];
                            2.0 * (out[c] - data.train.targets[i]) * dk[c]
                        })
                        .sum::<f64>()
                        / nb
                })
                .collect();
            adam.step(&grad, &mut theta)?;
        }
        val_history.push(val_loss(&theta)?);
    }
    let out = cell_outputs(&spec, &theta, data.k)?;
    let val = split_metrics(&out, &data.val, &data.scaler, config.bins)?;
    let test = split_metrics(&out, &data.test, &data.scaler, config.bins)?;
    let test_predictions = data
        .test
        .cells
        .iter()
        .zip(&data.test.raw_pt)
        .map(|(&c, &t)| (data.scaler.inverse(out[c]), t))
        .collect();
    Ok(HepOutcome {
        report: HepReport {
            config: config.clone(),
            initial_val_loss,
            final_val_loss: *val_history.last().unwrap_or(&initial_val_loss),
            val_history,
            val,
            test,
            scaler: data.scaler,
            theta,
        },
        test_predictions,
    })
}

impl HepOutcome {
    /// Histogram of `|pred − truth|` over `bins` uniform bins from 0 to the
    /// largest error.
    pub fn write_error_histogram<W: Write>(&self, writer: W, bins: usize) -> Result<()> {
        if bins == 0 {
            return Err(Error::InvalidArgument("bins must be positive".into()));
        }
        let errs: Vec<f64> = self.test_predictions.iter().map(|(p, t)| (p - t).abs()).collect();
        let top = errs.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut counts = vec![0u64; bins];
        for e in errs {
            counts[((e / top * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["lo", "hi", "count"])?;
        for (b, c) in counts.iter().enumerate() {
            w.write_record(&[
                format!("{:e}", top * b as f64 / bins as f64),
                format!("{:e}", top * (b + 1) as f64 / bins as f64),
                c.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ev(e1: f64, pz1: f64, e2: f64, pz2: f64) -> EventRecord {
        EventRecord { e1, px1: 0.0, py1: 0.0, pz1, e2, px2: 0.0, py2: 0.0, pz2, leading_pt: 1.0 }
    }

    #[test]
    fn feature_examples() {
        let (a, b) = derive_features(&ev(5.0, 5.0, 5.0, -5.0)).unwrap();
        assert_abs_diff_eq!(a, 10.0);
        assert_eq!(b, 0.0);
        let (a, b) = derive_features(&ev(3.0, 2.0, 4.0, -1.0)).unwrap();
        assert_abs_diff_eq!(a, 48f64.sqrt(), epsilon = 1e-14);
        assert_eq!(b, 1.0);
        assert_eq!(derive_features(&ev(4.0, -1.0, 3.0, 2.0)).unwrap(), (a, b));
        assert!(matches!(derive_features(&ev(1.0, 5.0, 1.0, 5.0)), Err(Error::MalformedEvent(_))));
        let mut e = ev(3.0, 2.0, 4.0, -1.0);
        e.px1 = 0.7;
        e.py2 = -2.0;
        assert_eq!(derive_features(&e).unwrap(), (a, b));
    }

    #[test]
    fn quantile_examples() {
        let q = QuantileTransformer::fit(&[3.0, 1.0, 4.0, 2.0]).unwrap();
        let t = q.transform_all(&[1.0, 2.0, 3.0, 4.0]);
        for (i, v) in t.iter().enumerate() {
            assert_abs_diff_eq!(*v, i as f64 * PI / 2.0, epsilon = 1e-15);
        }
        assert_eq!(q.transform(-5.0), 0.0);
        assert!(q.transform(100.0) < TAU);
        assert!(QuantileTransformer::fit(&[2.0, 2.0, 2.0]).is_err());
        let mut prev = -1.0;
        for i in 0..100 {
            let v = q.transform(0.5 + i as f64 * 0.04);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn discretize_examples() {
        assert_abs_diff_eq!(discretize(1.6, 4).unwrap(), PI / 2.0);
        let k = 9;
        for i in 0..k {
            let x = TAU * i as f64 / k as f64;
            assert_eq!(discretize(x, k).unwrap(), x);
        }
        assert_eq!(discretize(TAU - 0.01, k).unwrap(), 0.0);
        assert!(discretize(1.0, 1).is_err());
        let distinct: std::collections::BTreeSet<usize> =
            (0..1000).map(|i| grid_index(i as f64 * 0.00628, 7)).collect();
        assert!(distinct.len() <= 7);
    }

    #[test]
    fn scaler_examples() {
        let s = MinMaxScaler::fit(&[2.0, 10.0, 6.0]).unwrap();
        assert_eq!(s.scale(2.0), -1.0);
        assert_eq!(s.scale(10.0), 1.0);
        assert_eq!(s.scale(6.0), 0.0);
        for v in [2.5, 7.3, 100.0] {
            assert_abs_diff_eq!(s.inverse(s.scale(v)), v, epsilon = 1e-12);
        }
        assert!(MinMaxScaler::fit(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn loss_examples() {
        let t: Vec<f64> = (0..64).map(|i| -0.9 + i as f64 * 0.02).collect();
        let l = hep_loss(&t, &t, 32).unwrap();
        assert_eq!(l.total, 0.0);
        let delta = 0.5;
        let shifted: Vec<f64> = t.iter().map(|v| v + delta).collect();
        let l = hep_loss(&shifted, &t, 32).unwrap();
        assert_abs_diff_eq!(l.mse, delta * delta, epsilon = 1e-12);
        assert!(l.kl > 0.0);
        assert!(l.total >= l.mse);
        assert!(hep_loss(&t[..10], &t[..11], 4).is_err());
    }

    #[test]
    fn huber_examples() {
        let t = vec![0.0; 5];
        assert_eq!(huber_metric(&t, &t, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(huber_metric(&[0.5; 5], &t, 1.0).unwrap(), 0.125);
        assert_abs_diff_eq!(huber_metric(&[3.0; 5], &t, 1.0).unwrap(), 2.5);
    }

    #[test]
    fn synthetic_events() {
        let a = generate_synthetic_events(500, 3).unwrap();
        assert_eq!(a, generate_synthetic_events(500, 3).unwrap());
        assert!(a.iter().all(|e| e.validate().is_ok()));
        let mut buf = Vec::new();
        write_events_csv(&mut buf, &a[..5]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("E1,px1,py1,pz1,E2,px2,py2,pz2,leading_pt"));
        assert_eq!(read_events_csv(buf.as_slice()).unwrap(), a[..5].to_vec());
    }

    #[test]
    fn extra_columns_ignored_and_bad_rows_rejected() {
        let csv = "E1,px1,py1,pz1,E2,px2,py2,pz2,leading_pt,charge\n5,0,0,5,5,0,0,-5,3,1\n";
        let e = read_events_csv(csv.as_bytes()).unwrap();
        assert_eq!(e[0].leading_pt, 3.0);
        let bad = "E1,px1,py1,pz1,E2,px2,py2,pz2,leading_pt\n-1,0,0,5,5,0,0,-5,3\n";
        assert!(matches!(read_events_csv(bad.as_bytes()), Err(Error::MalformedEvent(_))));
    }

    #[test]
    fn short_run_is_deterministic_and_bounded() {
        let events = generate_synthetic_events(800, 1).unwrap();
        let cfg = HepConfig { epochs: 2, ..HepConfig::default() };
        let a = train_hep(&events, &cfg).unwrap();
        assert_eq!(a, train_hep(&events, &cfg).unwrap());
        assert_eq!(a.report.val_history.len(), 2);
        let data = prepare(&events, &cfg).unwrap();
        assert_eq!(data.train.len() + data.val.len() + data.test.len(), 800);
        let (lo, hi) = (data.scaler.min, data.scaler.max);
        let pad = 0.1 * (hi - lo);
        assert!(a.test_predictions.iter().all(|(p, _)| *p >= lo - pad && *p <= hi + pad));
        let mut buf = Vec::new();
        a.write_error_histogram(&mut buf, 10).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 11);
    }
}
