//! Expressibility: KL divergence between the fidelity distribution of random
//! ansatz states and the Haar fidelity distribution.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{build_ansatz_circuit, ModelSpec};
use crate::error::{Error, Result};
use crate::fingerprint::sample_theta;
use crate::seed::{self, Role};
use crate::statevec::{fidelity, StateVector};

pub const DEFAULT_BINS: usize = 75;

/// Haar probability of a fidelity in `[lo, hi]` for `n` qubits:
/// `(1 − lo)^{N−1} − (1 − hi)^{N−1}` with `N = 2ⁿ`.
pub fn haar_bin_mass(lo: f64, hi: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::InvalidArgument(format!("invalid fidelity interval [{lo}, {hi}]")));
    }
    if n == 0 || n > 60 {
        return Err(Error::InvalidArgument(format!("qubit count {n} out of range")));
    }
    let e = ((1u64 << n) - 1) as f64;
    Ok((1.0 - lo).powf(e) - (1.0 - hi).powf(e))
}

/// Uniform-bin fidelity histogram on `[0, 1]`; `F = 1` lands in the last bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityHistogram {
    pub bins: usize,
    pub counts: Vec<u64>,
    pub pairs: usize,
}

impl FidelityHistogram {
    pub fn from_samples(samples: &[f64], bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 bins, got {bins}")));
        }
        let mut counts = vec![0u64; bins];
        for &f in samples {
            if !(-1e-9..=1.0 + 1e-9).contains(&f) {
                return Err(Error::Numeric(format!("fidelity {f} outside [0, 1]")));
            }
            let b = ((f.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(FidelityHistogram { bins, counts, pairs: samples.len() })
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|b| b as f64 / self.bins as f64).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.pairs as f64).collect()
    }

    /// Haar masses of each bin.
    pub fn haar_masses(&self, n: usize) -> Result<Vec<f64>> {
        let e = self.edges();
        e.windows(2).map(|w| haar_bin_mass(w[0], w[1], n)).collect()
    }

    /// `Σ p log(p / q)` against the Haar masses; empty bins contribute 0.
    pub fn kl_to_haar(&self, n: usize) -> Result<f64> {
        if self.pairs == 0 {
            return Err(Error::InvalidArgument("empty histogram".into()));
        }
        let q = self.haar_masses(n)?;
        let kl: f64 = self
            .frequencies()
            .iter()
            .zip(&q)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &q)| {
                // Far tail bins underflow for large n; keep the term finite.
                p * (p / q.max(f64::MIN_POSITIVE)).ln()
            })
            .sum();
        Ok(kl.max(0.0))
    }

    pub fn write_csv<W: Write>(&self, writer: W, n: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bin_lo", "bin_hi", "count", "frequency", "haar_mass"])?;
        let e = self.edges();
        let q = self.haar_masses(n)?;
        let p = self.frequencies();
        for b in 0..self.bins {
            w.write_record(&[
                format!("{}", e[b]),
                format!("{}", e[b + 1]),
                self.counts[b].to_string(),
                format!("{:e}", p[b]),
                format!("{:e}", q[b]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressibilityResult {
    pub kl: f64,
    /// `exp(−kl)`.
    pub complement: f64,
    pub bins: usize,
    pub pairs: usize,
    pub seed: u64,
    pub histogram: FidelityHistogram,
}

/// State of the ansatz-only circuit (all blocks, no encoding) on `|0⟩`.
pub fn ansatz_state(spec: &ModelSpec, theta: &[f64]) -> Result<StateVector> {
    let gates = build_ansatz_circuit(spec, theta)?;
    let mut s = StateVector::zero(spec.n)?;
    s.apply_all(&gates)?;
    Ok(s)
}

/// Haar-random state: normalized vector of i.i.d. complex Gaussians.
pub fn haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    let dim = 1usize << n;
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Fidelities between states `prep(2i)` and `prep(2i + 1)` for `i < pairs`.
pub fn fidelities_by<F>(pairs: usize, prep: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<StateVector> + Sync,
{
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    (0..pairs)
        .into_par_iter()
        .with_min_len(16)
        .map(|i| i as u64)
        .map(|i| {
            let a = prep(2 * i)?;
            let b = prep(2 * i + 1)?;
            fidelity(&a, &b)
        })
        .collect()
}

/// Fidelities of ansatz states under independent uniform parameter draws.
pub fn sample_fidelities(spec: &ModelSpec, pairs: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    fidelities_by(pairs, |i| ansatz_state(spec, &sample_theta(spec, seed, i)))
}

/// Fidelities of Haar-random state pairs.
pub fn haar_fidelities(n: usize, pairs: usize, seed: u64) -> Result<Vec<f64>> {
    fidelities_by(pairs, |i| haar_state(n, &mut seed::stream(seed, Role::Oracle, i)))
}

pub fn expressibility_from_samples(
    samples: &[f64],
    n: usize,
    bins: usize,
    seed: u64,
) -> Result<ExpressibilityResult> {
    let histogram = FidelityHistogram::from_samples(samples, bins)?;
    let kl = histogram.kl_to_haar(n)?;
    Ok(ExpressibilityResult {
        kl,
        complement: (-kl).exp(),
        bins,
        pairs: samples.len(),
        seed,
        histogram,
    })
}

pub fn expressibility(spec: &ModelSpec, pairs: usize, bins: usize, seed: u64) -> Result<ExpressibilityResult> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {bins}")));
    }
    let f = sample_fidelities(spec, pairs, seed)?;
    expressibility_from_samples(&f, spec.n, bins, seed)
}
