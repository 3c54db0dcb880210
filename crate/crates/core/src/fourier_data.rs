//! Random truncated Fourier-series targets and their grid-sampled regression
//! datasets.

use std::f64::consts::TAU;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Role};
use crate::spectral::{half_spectrum, make_input_grid, CoefficientTensor};

/// Largest tolerated imaginary part when evaluating a symmetric target.
const IMAG_TOLERANCE: f64 = 1e-12;

/// `f̂(x) = Σ_ω ĉ_ω e^{iω·x}` over `ω ∈ [−band, band]^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeriesTarget {
    pub coefficients: CoefficientTensor,
    pub seed: u64,
    /// Whether `ĉ_{−ω} = conj(ĉ_ω)` was enforced (real-valued series).
    pub hermitian: bool,
}

/// `√r·e^{−i2πp}` with `r, p ~ U(0, 1]`: uniform on the unit disk.
fn disk_sample<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = 1.0 - rng.random::<f64>();
    let p = 1.0 - rng.random::<f64>();
    Complex64::from_polar(r.sqrt(), -TAU * p)
}

/// Real-valued random series: coefficients drawn on the canonical
/// half-spectrum and mirrored as conjugates; `ĉ_0 = √r` is real.
pub fn random_target(band: usize, dims: usize, seed: u64) -> Result<FourierSeriesTarget> {
    check_shape(band, dims)?;
    let mut rng = seed::stream(seed, Role::Target, 0);
    let mut c = CoefficientTensor::zeros(dims, band);
    for w in half_spectrum(band, dims) {
        if w.iter().all(|&x| x == 0) {
            let r = 1.0 - rng.random::<f64>();
            c.set(&w, Complex64::new(r.sqrt(), 0.0))?;
        } else {
            let v = disk_sample(&mut rng);
            let neg: Vec<i64> = w.iter().map(|x| -x).collect();
            c.set(&w, v)?;
            c.set(&neg, v.conj())?;
        }
    }
    Ok(FourierSeriesTarget { coefficients: c, seed, hermitian: true })
}

/// Every `ĉ_ω` drawn independently, giving a complex-valued series.
pub fn random_complex_target(band: usize, dims: usize, seed: u64) -> Result<FourierSeriesTarget> {
    check_shape(band, dims)?;
    let mut rng = seed::stream(seed, Role::Target, 0);
    let values = (0..(2 * band + 1).pow(dims as u32)).map(|_| disk_sample(&mut rng)).collect();
    Ok(FourierSeriesTarget {
        coefficients: CoefficientTensor::from_values(dims, band, values)?,
        seed,
        hermitian: false,
    })
}

fn check_shape(band: usize, dims: usize) -> Result<()> {
    if band == 0 || dims == 0 {
        return Err(Error::InvalidArgument("band and dimension must be positive".into()));
    }
    Ok(())
}

impl FourierSeriesTarget {
    pub fn from_coefficients(coefficients: CoefficientTensor) -> Result<Self> {
        let hermitian = coefficients.hermitian_defect() < 1e-12;
        Ok(FourierSeriesTarget { coefficients, seed: 0, hermitian })
    }

    pub fn dims(&self) -> usize {
        self.coefficients.dims()
    }

    pub fn band(&self) -> usize {
        self.coefficients.band()
    }

    /// `Σ|ĉ_ω|`, an upper bound on `|f̂|`.
    pub fn abs_sum(&self) -> f64 {
        self.coefficients.values().iter().map(|c| c.norm()).sum()
    }

    pub fn evaluate_complex(&self, x: &[f64]) -> Result<Complex64> {
        self.coefficients.evaluate_at(x)
    }

    /// Real value of a Hermitian series at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let v = self.evaluate_complex(x)?;
        if v.im.abs() > IMAG_TOLERANCE {
            return Err(Error::Numeric(format!(
                "target has imaginary part {:e} at {x:?}",
                v.im
            )));
        }
        Ok(v.re)
    }
}

/// Samples of a target on the `K^D` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDataset {
    pub dims: usize,
    pub k: usize,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Imaginary parts for complex targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets_imag: Option<Vec<f64>>,
    pub seed: u64,
}

/// Dataset on the default grid `K = 2·band + 1`.
pub fn make_dataset(target: &FourierSeriesTarget) -> Result<RegressionDataset> {
    make_dataset_on(target, None)
}

pub fn make_dataset_on(target: &FourierSeriesTarget, k: Option<usize>) -> Result<RegressionDataset> {
    let grid = make_input_grid(target.band(), target.dims(), k)?;
    let values = target.coefficients.reconstruct(grid.k())?;
    let targets_imag = if target.hermitian {
        if let Some(v) = values.iter().find(|v| v.im.abs() > IMAG_TOLERANCE) {
            return Err(Error::Numeric(format!("target has imaginary part {:e}", v.im)));
        }
        None
    } else {
        Some(values.iter().map(|v| v.im).collect())
    };
    Ok(RegressionDataset {
        dims: grid.dims(),
        k: grid.k(),
        inputs: grid.points().to_vec(),
        targets: values.iter().map(|v| v.re).collect(),
        targets_imag,
        seed: target.seed,
    })
}

impl RegressionDataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Columns `x0..x{D-1},target` plus `target_im` for complex targets.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.dims).map(|d| format!("x{d}")).collect();
        header.push("target".into());
        if self.targets_imag.is_some() {
            header.push("target_im".into());
        }
        w.write_record(&header)?;
        for (i, x) in self.inputs.iter().enumerate() {
            let mut rec: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
            rec.push(format!("{:?}", self.targets[i]));
            if let Some(im) = &self.targets_imag {
                rec.push(format!("{:?}", im[i]));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a dataset written by [`RegressionDataset::write_csv`]. The grid
    /// size is inferred from the row count.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let dims = header.iter().filter(|h| h.starts_with('x')).count();
        let has_imag = header.iter().any(|h| h == "target_im");
        if dims == 0 || header.len() != dims + 1 + has_imag as usize {
            return Err(Error::InvalidArgument(format!("unexpected dataset header {header:?}")));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad number `{s}`: {e}")))
        };
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        let mut imag = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            inputs.push((0..dims).map(|d| parse(&rec[d])).collect::<Result<Vec<f64>>>()?);
            targets.push(parse(&rec[dims])?);
            if has_imag {
                imag.push(parse(&rec[dims + 1])?);
            }
        }
        let k = (inputs.len() as f64).powf(1.0 / dims as f64).round() as usize;
        if k.pow(dims as u32) != inputs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows do not form a {dims}-dimensional grid",
                inputs.len()
            )));
        }
        Ok(RegressionDataset {
            dims,
            k,
            inputs,
            targets,
            targets_imag: has_imag.then_some(imag),
            seed: 0,
        })
    }
}
