//! Input grids, discrete Fourier analysis of model outputs and coefficient
//! tensors.
//!
//! Coefficients follow the series convention `f(x) = Σ_ω c_ω e^{iω·x}`, so the
//! forward transform carries the `1/K^D` normalization. Frequencies are stored
//! in the signed range `[-B, B]^D` centered on zero. For an even `K` the
//! Nyquist bin is split evenly between `+K/2` and `-K/2`, which keeps both
//! exact reconstruction and Hermitian symmetry.

use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{CompiledModel, ModelSpec};
use crate::error::{Error, Result};
use crate::seed::{self, Role};

/// Equally spaced sample points `2πk/K`, `k ∈ [0, K)`, on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct InputGrid {
    dims: usize,
    k: usize,
    points: Vec<Vec<f64>>,
}

impl InputGrid {
    /// Points per axis.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// All `K^D` points in row-major order (axis 0 varies slowest).
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid coordinate `2πi/K`.
    pub fn coordinate(&self, i: usize) -> f64 {
        TAU * i as f64 / self.k as f64
    }
}

/// Builds the sampling grid for a band-limited function with maximum
/// frequency `band` per axis. `K` defaults to `2·band + 1`.
pub fn make_input_grid(band: usize, dims: usize, k: Option<usize>) -> Result<InputGrid> {
    if dims == 0 {
        return Err(Error::InvalidArgument("grid dimension must be at least 1".into()));
    }
    let need = 2 * band + 1;
    let k = k.unwrap_or(need);
    if k < need {
        return Err(Error::Aliasing { k, band, need });
    }
    let total = k
        .checked_pow(dims as u32)
        .ok_or_else(|| Error::InvalidArgument(format!("grid {k}^{dims} too large")))?;
    let coords: Vec<f64> = (0..k).map(|i| TAU * i as f64 / k as f64).collect();
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut p = vec![0.0; dims];
        for d in (0..dims).rev() {
            p[d] = coords[rem % k];
            rem /= k;
        }
        points.push(p);
    }
    Ok(InputGrid { dims, k, points })
}

/// Complex Fourier coefficients over `ω ∈ [-B, B]^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    dims: usize,
    band: usize,
    values: Vec<Complex64>,
}

impl CoefficientTensor {
    /// Wraps values laid out row-major over `[-band, band]^dims`.
    pub fn from_values(dims: usize, band: usize, values: Vec<Complex64>) -> Result<Self> {
        let side = 2 * band + 1;
        let expected = side.pow(dims as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        Ok(CoefficientTensor { dims, band, values })
    }

    pub fn zeros(dims: usize, band: usize) -> Self {
        let side = 2 * band + 1;
        CoefficientTensor {
            dims,
            band,
            values: vec![Complex64::new(0.0, 0.0); side.pow(dims as u32)],
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Highest stored frequency per axis.
    pub fn band(&self) -> usize {
        self.band
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn side(&self) -> usize {
        2 * self.band + 1
    }

    fn flat_index(&self, omega: &[i64]) -> Option<usize> {
        if omega.len() != self.dims {
            return None;
        }
        let b = self.band as i64;
        let mut idx = 0usize;
        for &w in omega {
            if w < -b || w > b {
                return None;
            }
            idx = idx * self.side() + (w + b) as usize;
        }
        Some(idx)
    }

    fn omega_of(&self, mut flat: usize) -> Vec<i64> {
        let side = self.side();
        let mut omega = vec![0i64; self.dims];
        for d in (0..self.dims).rev() {
            omega[d] = (flat % side) as i64 - self.band as i64;
            flat /= side;
        }
        omega
    }

    /// `c_ω`, or zero outside the stored band.
    pub fn get(&self, omega: &[i64]) -> Complex64 {
        self.flat_index(omega)
            .map(|i| self.values[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, omega: &[i64], value: Complex64) -> Result<()> {
        let i = self.flat_index(omega).ok_or_else(|| {
            Error::InvalidArgument(format!("frequency {omega:?} outside band {}", self.band))
        })?;
        self.values[i] = value;
        Ok(())
    }

    /// `(ω, c_ω)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, &c)| (self.omega_of(i), c))
    }

    /// Restriction to `[-band, band]^D`.
    pub fn truncate(&self, band: usize) -> Result<Self> {
        if band > self.band {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate band {} to larger band {band}",
                self.band
            )));
        }
        let mut out = CoefficientTensor::zeros(self.dims, band);
        for (flat, v) in out.values.iter_mut().enumerate() {
            let side = 2 * band + 1;
            let mut rem = flat;
            let mut omega = vec![0i64; self.dims];
            for d in (0..self.dims).rev() {
                omega[d] = (rem % side) as i64 - band as i64;
                rem /= side;
            }
            *v = self.get(&omega);
        }
        Ok(out)
    }

    /// `max_ω |c_{-ω} − conj(c_ω)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.iter()
            .map(|(w, c)| {
                let neg: Vec<i64> = w.iter().map(|x| -x).collect();
                (self.get(&neg) - c.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|c_ω|` over frequencies with some component above `band`.
    pub fn max_outside(&self, band: usize) -> f64 {
        let b = band as i64;
        self.iter()
            .filter(|(w, _)| w.iter().any(|x| x.abs() > b))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_ω |c_ω|²`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_ω c_ω e^{iω·x}` evaluated directly.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, got: x.len() });
        }
        Ok(self
            .iter()
            .map(|(w, c)| {
                let phase: f64 = w.iter().zip(x).map(|(&wi, &xi)| wi as f64 * xi).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum())
    }

    /// Values of the series on a `K^D` grid, row-major. Inverse of [`dft`].
    pub fn reconstruct(&self, k: usize) -> Result<Vec<Complex64>> {
        if k == 0 {
            return Err(Error::InvalidArgument("grid size must be positive".into()));
        }
        let shape = vec![self.side(); self.dims];
        let twiddle = Twiddle::new(k);
        let band = self.band as i64;
        let (data, _) = (0..self.dims).fold((self.values.clone(), shape), |(data, shape), axis| {
            transform_axis(&data, &shape, axis, k, |fiber| {
                (0..k)
                    .map(|j| {
                        fiber
                            .iter()
                            .enumerate()
                            .map(|(i, c)| c * twiddle.get((i as i64 - band) * j as i64))
                            .sum()
                    })
                    .collect()
            })
        });
        Ok(data)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.dims).map(|d| format!("w{d}")).collect();
        header.push("re".into());
        header.push("im".into());
        w.write_record(&header)?;
        for (omega, c) in self.iter() {
            let mut rec: Vec<String> = omega.iter().map(|x| x.to_string()).collect();
            rec.push(format!("{:e}", c.re));
            rec.push(format!("{:e}", c.im));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let dims = r.headers()?.len().checked_sub(2).filter(|&d| d > 0).ok_or_else(|| {
            Error::InvalidArgument("coefficient CSV needs frequency, re and im columns".into())
        })?;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse_err = |e: std::num::ParseIntError| Error::InvalidArgument(e.to_string());
            let parse_f = |e: std::num::ParseFloatError| Error::InvalidArgument(e.to_string());
            let omega = (0..dims)
                .map(|d| rec[d].trim().parse::<i64>().map_err(parse_err))
                .collect::<Result<Vec<_>>>()?;
            let re = rec[dims].trim().parse::<f64>().map_err(parse_f)?;
            let im = rec[dims + 1].trim().parse::<f64>().map_err(parse_f)?;
            rows.push((omega, Complex64::new(re, im)));
        }
        let band = rows
            .iter()
            .flat_map(|(w, _)| w.iter().map(|x| x.unsigned_abs() as usize))
            .max()
            .unwrap_or(0);
        let mut t = CoefficientTensor::zeros(dims, band);
        for (w, c) in rows {
            t.set(&w, c)?;
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TensorDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TensorDoc = serde_json::from_str(s)?;
        let mut t = CoefficientTensor::zeros(doc.dims, doc.band);
        for e in doc.coefficients {
            t.set(&e.omega, Complex64::new(e.re, e.im))?;
        }
        Ok(t)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    omega: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    dims: usize,
    band: usize,
    coefficients: Vec<TensorEntry>,
}

impl From<&CoefficientTensor> for TensorDoc {
    fn from(t: &CoefficientTensor) -> Self {
        TensorDoc {
            dims: t.dims,
            band: t.band,
            coefficients: t
                .iter()
                .map(|(omega, c)| TensorEntry { omega, re: c.re, im: c.im })
                .collect(),
        }
    }
}

/// `e^{-2πi m/K}` looked up by `m mod K`, so large products stay exact.
struct Twiddle {
    k: usize,
    table: Vec<Complex64>,
}

impl Twiddle {
    fn new(k: usize) -> Self {
        let table = (0..k)
            .map(|m| Complex64::from_polar(1.0, TAU * m as f64 / k as f64))
            .collect();
        Twiddle { k, table }
    }

    /// `e^{+2πi m/K}`.
    #[inline]
    fn get(&self, m: i64) -> Complex64 {
        self.table[m.rem_euclid(self.k as i64) as usize]
    }
}

/// Applies `f` to every fiber along `axis`, replacing that axis' length by
/// `out_len`.
fn transform_axis<F>(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    out_len: usize,
    f: F,
) -> (Vec<Complex64>, Vec<usize>)
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * out_len * inner];
    let mut fiber = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        for i in 0..inner {
            for (j, v) in fiber.iter_mut().enumerate() {
                *v = data[(o * len + j) * inner + i];
            }
            let res = f(&fiber);
            for (j, v) in res.into_iter().enumerate() {
                out[(o * out_len + j) * inner + i] = v;
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = out_len;
    (out, new_shape)
}

fn dft_fiber(fiber: &[Complex64], twiddle: &Twiddle) -> Vec<Complex64> {
    let k = fiber.len();
    let band = k / 2;
    let scale = 1.0 / k as f64;
    let even = k % 2 == 0;
    (-(band as i64)..=band as i64)
        .map(|w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in fiber.iter().enumerate() {
                acc += v * twiddle.get(-w * j as i64);
            }
            let c = acc * scale;
            if even && w.unsigned_abs() as usize == band {
                c * 0.5
            } else {
                c
            }
        })
        .collect()
}

/// Forward DFT of samples on a `K^D` grid (row-major, axis 0 slowest):
/// `c_ω = K^{-D} Σ_x f(x) e^{-iω·x}`, evaluated as a direct sum per axis.
pub fn dft(values: &[Complex64], k: usize, dims: usize) -> Result<CoefficientTensor> {
    if k == 0 || dims == 0 {
        return Err(Error::InvalidArgument("grid size and dimension must be positive".into()));
    }
    let expected = k.pow(dims as u32);
    if values.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: values.len() });
    }
    let band = k / 2;
    let side = 2 * band + 1;
    let twiddle = Twiddle::new(k);
    let (data, _) = (0..dims).fold((values.to_vec(), vec![k; dims]), |(data, shape), axis| {
        transform_axis(&data, &shape, axis, side, |fiber| dft_fiber(fiber, &twiddle))
    });
    CoefficientTensor::from_values(dims, band, data)
}

/// [`dft`] of real samples.
pub fn dft_real(values: &[f64], k: usize, dims: usize) -> Result<CoefficientTensor> {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(&complex, k, dims)
}

/// Model outputs at every point of `grid`.
pub fn evaluate_on_grid(model: &CompiledModel, grid: &InputGrid) -> Result<Vec<f64>> {
    grid.points()
        .par_iter()
        .with_min_len(64)
        .map(|p| model.evaluate(p))
        .collect()
}

/// Coefficients of `f(·, θ)` from the default Nyquist grid (`K = 2nL+1`).
pub fn model_coefficients(spec: &ModelSpec, theta: &[f64]) -> Result<CoefficientTensor> {
    model_coefficients_on(spec, theta, None)
}

/// Coefficients of `f(·, θ)` sampled on a `K`-point-per-axis grid.
pub fn model_coefficients_on(
    spec: &ModelSpec,
    theta: &[f64],
    k: Option<usize>,
) -> Result<CoefficientTensor> {
    let grid = make_input_grid(spec.max_frequency(), spec.dims(), k)?;
    let model = CompiledModel::new(spec, theta)?;
    let values = evaluate_on_grid(&model, &grid)?;
    dft_real(&values, grid.k(), grid.dims())
}

/// Coefficients estimated from shot-sampled outputs: every grid point is
/// measured `shots` times with its own derived stream.
pub fn model_coefficients_shots(
    spec: &ModelSpec,
    theta: &[f64],
    shots: usize,
    seed: u64,
) -> Result<CoefficientTensor> {
    let grid = make_input_grid(spec.max_frequency(), spec.dims(), None)?;
    let model = CompiledModel::new(spec, theta)?;
    let values = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = seed::stream(seed, Role::Shots, i as u64);
            model.state(p)?.sample_mean_z_with(shots, &mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;
    dft_real(&values, grid.k(), grid.dims())
}

/// Canonical representatives of `{ω, -ω}` pairs in `[-band, band]^D`,
/// including `ω = 0`.
///
/// `ω` is canonical when it is zero or its last nonzero component is
/// positive. For `D = 1` this is `0, 1, …, band`; for `D = 2` it is
/// `(ω₁, 0)` with `ω₁ ≥ 0` followed by `(ω₁, ω₂)` with `ω₂ > 0`, ordered by
/// `ω₂` then `ω₁`.
pub fn half_spectrum(band: usize, dims: usize) -> Vec<Vec<i64>> {
    let b = band as i64;
    let side = 2 * band + 1;
    let total = side.pow(dims as u32);
    let mut out: Vec<Vec<i64>> = (0..total)
        .map(|mut flat| {
            let mut w = vec![0i64; dims];
            for d in 0..dims {
                w[d] = (flat % side) as i64 - b;
                flat /= side;
            }
            w
        })
        .filter(|w| match w.iter().rev().find(|&&x| x != 0) {
            None => true,
            Some(&x) => x > 0,
        })
        .collect();
    // Order by last component first, then earlier ones.
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Multiplicity of frequency `omega` in the eigenvalue-gap multiset of an
/// `L`-layer single-qubit Pauli encoding on `n` qubits.
///
/// Each of the `nL` encoding rotations contributes an eigenvalue `±½`, so a
/// gap `ω` arises from pairs with `p - q = ω` "+" signs; the count is
/// `Σ_p C(nL, p) C(nL, p-ω) = C(2nL, nL-|ω|)`.
pub fn degeneracy(n: usize, layers: usize, omega: i64) -> Result<u64> {
    let nl = (n * layers) as u64;
    let w = omega.unsigned_abs();
    if w > nl {
        return Err(Error::InvalidArgument(format!(
            "frequency {omega} outside band {nl}"
        )));
    }
    let count: u128 = (w..=nl).map(|p| binomial(nl, p) * binomial(nl, p - w)).sum();
    u64::try_from(count).map_err(|_| Error::Numeric(format!("degeneracy overflows u64 for nL={nl}")))
}
