//! Coefficient sampling, the Fourier fingerprint (absolute Pearson
//! correlations between coefficients under random parameters), the FCC and
//! its weighted variant, variance profiles and sampling-error estimates.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::ModelSpec;
use crate::error::{Error, Result};
use crate::seed::{self, Role};
use crate::spectral::{degeneracy, half_spectrum, model_coefficients};

/// Columns whose sample variance falls below this are treated as constant.
pub const VARIANCE_FLOOR: f64 = 1e-24;

/// Where a sample matrix came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSource {
    Model { spec: ModelSpec },
    Surrogate { n: usize, layers: usize },
}

/// `M` coefficient vectors over the canonical half-spectrum, one row per
/// parameter draw.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSamples {
    pub source: SampleSource,
    pub master_seed: u64,
    frequencies: Vec<Vec<i64>>,
    rows: Vec<Vec<Complex64>>,
}

impl CoefficientSamples {
    /// Wraps a raw sample matrix (`rows[m][j]` is frequency `j` of sample `m`).
    pub fn from_rows(
        source: SampleSource,
        master_seed: u64,
        frequencies: Vec<Vec<i64>>,
        rows: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != frequencies.len()) {
            return Err(Error::DimensionMismatch { expected: frequencies.len(), got: bad.len() });
        }
        Ok(CoefficientSamples { source, master_seed, frequencies, rows })
    }

    pub fn sample_count(&self) -> usize {
        self.rows.len()
    }

    pub fn frequencies(&self) -> &[Vec<i64>] {
        &self.frequencies
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Keeps the first `m` rows. Rows are keyed by index, so this equals a
    /// fresh run with `m` samples.
    pub fn truncated(&self, m: usize) -> Self {
        CoefficientSamples {
            source: self.source.clone(),
            master_seed: self.master_seed,
            frequencies: self.frequencies.clone(),
            rows: self.rows[..m.min(self.rows.len())].to_vec(),
        }
    }
}

/// Parameters of sample `index`: i.i.d. `U[0, 2π)` from stream
/// `(master_seed, Theta, index)`.
pub fn sample_theta(spec: &ModelSpec, master_seed: u64, index: u64) -> Vec<f64> {
    let mut rng = seed::stream(master_seed, Role::Theta, index);
    spec.random_params(&mut rng)
}

/// Draws `m` parameter vectors and records the half-spectrum coefficients of
/// each resulting model.
pub fn sample_coefficients(spec: &ModelSpec, m: usize, master_seed: u64) -> Result<CoefficientSamples> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {m}")));
    }
    spec.validate()?;
    let frequencies = half_spectrum(spec.max_frequency(), spec.dims());
    let rows = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let theta = sample_theta(spec, master_seed, i);
            let c = model_coefficients(spec, &theta)?;
            Ok(frequencies.iter().map(|w| c.get(w)).collect())
        })
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    CoefficientSamples::from_rows(
        SampleSource::Model { spec: spec.clone() },
        master_seed,
        frequencies,
        rows,
    )
}

/// Independent zero-mean complex Gaussian coefficients with
/// `E|c_ω|² = degeneracy(n, L, ω) / 4^{nL}` over `ω = 0..=nL`.
pub fn surrogate_samples(n: usize, layers: usize, m: usize, master_seed: u64) -> Result<CoefficientSamples> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {m}")));
    }
    if n == 0 || layers == 0 {
        return Err(Error::InvalidArgument("qubits and layers must be positive".into()));
    }
    let band = n * layers;
    let total = 4f64.powi(band as i32);
    let sigmas = (0..=band as i64)
        .map(|w| Ok((degeneracy(n, layers, w)? as f64 / total / 2.0).sqrt()))
        .collect::<Result<Vec<f64>>>()?;
    let rows = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(master_seed, Role::Surrogate, i);
            sigmas
                .iter()
                .map(|s| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * s, im * s)
                })
                .collect()
        })
        .collect();
    CoefficientSamples::from_rows(
        SampleSource::Surrogate { n, layers },
        master_seed,
        half_spectrum(band, 1),
        rows,
    )
}

/// How complex coefficients enter the Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// `Σ (a - ā)·conj(b - b̄) / √(Σ|a - ā|² Σ|b - b̄|²)`, then modulus.
    #[default]
    Complex,
    /// Real and imaginary parts stacked as `2M` real samples per column.
    SplitReIm,
}

/// Symmetric matrix of `|r(ω, ω′)|` over the half-spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    frequencies: Vec<Vec<i64>>,
    matrix: Vec<f64>,
    degenerate: Vec<bool>,
    pub sample_count: usize,
    pub master_seed: u64,
    pub mode: CorrelationMode,
}

impl Fingerprint {
    /// Builds a fingerprint from an explicit correlation matrix, e.g. for
    /// analysis of externally computed correlations.
    pub fn from_matrix(
        frequencies: Vec<Vec<i64>>,
        matrix: Vec<f64>,
        sample_count: usize,
    ) -> Result<Self> {
        let p = frequencies.len();
        if matrix.len() != p * p {
            return Err(Error::DimensionMismatch { expected: p * p, got: matrix.len() });
        }
        Ok(Fingerprint {
            degenerate: vec![false; p],
            frequencies,
            matrix,
            sample_count,
            master_seed: 0,
            mode: CorrelationMode::Complex,
        })
    }

    pub fn size(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[Vec<i64>] {
        &self.frequencies
    }

    /// Row-major `P × P` matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.size() + j]
    }

    /// Columns excluded for (near-)zero variance.
    pub fn degenerate(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn degenerate_frequencies(&self) -> Vec<Vec<i64>> {
        self.frequencies
            .iter()
            .zip(&self.degenerate)
            .filter(|(_, &d)| d)
            .map(|(w, _)| w.clone())
            .collect()
    }

    /// Rows as vectors, for rendering.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.size()).map(|r| r.to_vec()).collect()
    }

    /// Strict-lower-triangle pairs `(i, j)`, `i > j`, where neither column is
    /// degenerate.
    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let p = self.size();
        (0..p)
            .flat_map(move |i| (0..i).map(move |j| (i, j)))
            .filter(move |&(i, j)| !self.degenerate[i] && !self.degenerate[j])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["omega".to_string()];
        header.extend(self.frequencies.iter().map(|f| frequency_label(f)));
        w.write_record(&header)?;
        for (i, f) in self.frequencies.iter().enumerate() {
            let mut rec = vec![frequency_label(f)];
            rec.extend((0..self.size()).map(|j| format!("{:.12e}", self.get(i, j))));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `3` in one dimension, `(1;-2)` in two.
pub fn frequency_label(omega: &[i64]) -> String {
    if omega.len() == 1 {
        omega[0].to_string()
    } else {
        let parts: Vec<String> = omega.iter().map(|w| w.to_string()).collect();
        format!("({})", parts.join(";"))
    }
}

/// Complex Pearson fingerprint of `samples`.
pub fn pearson_matrix(samples: &CoefficientSamples) -> Result<Fingerprint> {
    pearson_matrix_with(samples, CorrelationMode::Complex)
}

pub fn pearson_matrix_with(samples: &CoefficientSamples, mode: CorrelationMode) -> Result<Fingerprint> {
    pearson_matrix_floor(samples, mode, VARIANCE_FLOOR)
}

/// Pearson fingerprint with an explicit variance floor. Columns whose
/// sample variance is below `variance_floor`, or exactly zero, are flagged
/// and get `|r| = 0` against every partner.
///
/// With a floor of 0, columns that are zero up to rounding (frequencies the
/// circuit cannot produce) still enter, and their correlations reflect only
/// floating-point noise.
pub fn pearson_matrix_floor(
    samples: &CoefficientSamples,
    mode: CorrelationMode,
    variance_floor: f64,
) -> Result<Fingerprint> {
    let m = samples.sample_count();
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {m}")));
    }
    let p = samples.frequencies.len();
    // Centered columns; split mode stacks real then imaginary parts.
    let centered: Vec<Vec<Complex64>> = (0..p)
        .map(|j| {
            let col = samples.column(j);
            let col: Vec<Complex64> = match mode {
                CorrelationMode::Complex => col,
                CorrelationMode::SplitReIm => col
                    .iter()
                    .map(|c| Complex64::new(c.re, 0.0))
                    .chain(col.iter().map(|c| Complex64::new(c.im, 0.0)))
                    .collect(),
            };
            let mean = col.iter().sum::<Complex64>() / col.len() as f64;
            col.into_iter().map(|c| c - mean).collect()
        })
        .collect();
    let ss: Vec<f64> = centered.iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum()).collect();
    let len = centered.first().map(|c| c.len()).unwrap_or(0);
    let degenerate: Vec<bool> = ss
        .iter()
        .map(|&s| s == 0.0 || s / ((len - 1) as f64) < variance_floor)
        .collect();
    if degenerate.iter().all(|&d| d) {
        return Err(Error::Degenerate("every coefficient column is constant".into()));
    }
    let mut matrix = vec![0.0; p * p];
    for i in 0..p {
        matrix[i * p + i] = 1.0;
        if degenerate[i] {
            continue;
        }
        for j in 0..i {
            if degenerate[j] {
                continue;
            }
            let cov: Complex64 =
                centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b.conj()).sum();
            let r = (cov.norm() / (ss[i] * ss[j]).sqrt()).min(1.0);
            matrix[i * p + j] = r;
            matrix[j * p + i] = r;
        }
    }
    Ok(Fingerprint {
        frequencies: samples.frequencies.clone(),
        matrix,
        degenerate,
        sample_count: m,
        master_seed: samples.master_seed,
        mode,
    })
}

/// Pair weighting for [`weighted_fcc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Uniform,
    /// `w = (‖ω‖₁ + ‖ω′‖₁)⁻¹`.
    InverseLinear,
}

fn l1(w: &[i64]) -> f64 {
    w.iter().map(|x| x.unsigned_abs() as f64).sum()
}

/// Mean `|r|` over the strict lower triangle (diagonal excluded), skipping
/// degenerate columns.
pub fn fcc(fp: &Fingerprint) -> Result<f64> {
    weighted_fcc(fp, Weighting::Uniform)
}

/// `Σ |r|·w / Σ w` over the strict lower triangle.
pub fn weighted_fcc(fp: &Fingerprint, weighting: Weighting) -> Result<f64> {
    match weighting {
        Weighting::Uniform => weighted_fcc_by(fp, |_, _| Some(1.0)),
        Weighting::InverseLinear => weighted_fcc_by(fp, |a, b| {
            let s = l1(a) + l1(b);
            (s > 0.0).then(|| 1.0 / s)
        }),
    }
}

/// Weighted FCC with an arbitrary nonnegative pair weight; pairs mapped to
/// `None` are left out.
pub fn weighted_fcc_by<F>(fp: &Fingerprint, weight: F) -> Result<f64>
where
    F: Fn(&[i64], &[i64]) -> Option<f64>,
{
    if fp.size() < 2 {
        return Err(Error::InvalidArgument("FCC needs at least two frequencies".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, j) in fp.pairs() {
        if let Some(w) = weight(&fp.frequencies[i], &fp.frequencies[j]) {
            if w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative pair weight {w}")));
            }
            num += fp.get(i, j) * w;
            den += w;
        }
    }
    if den <= 0.0 {
        return Err(Error::Degenerate("no frequency pair with positive weight".into()));
    }
    Ok(num / den)
}

/// `(1/P) Σ_pairs √((1 − r²)/(M − 1)²)` over the pairs used by [`fcc`].
pub fn fcc_stderr(fp: &Fingerprint, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {m}")));
    }
    let (sum, count) = fp
        .pairs()
        .map(|(i, j)| (1.0 - fp.get(i, j).powi(2)).max(0.0).sqrt() / (m - 1) as f64)
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return Err(Error::Degenerate("no frequency pairs".into()));
    }
    Ok(sum / count as f64)
}

/// Per-frequency sample statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    pub frequencies: Vec<Vec<i64>>,
    pub var_re: Vec<f64>,
    pub var_im: Vec<f64>,
    pub var_abs: Vec<f64>,
    pub mean_re: Vec<f64>,
    pub mean_im: Vec<f64>,
}

fn unbiased_variance(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum) = xs.clone().fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    let mean = sum / n as f64;
    let ss: f64 = xs.map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (n - 1) as f64)
}

pub fn variance_profile(samples: &CoefficientSamples) -> Result<VarianceProfile> {
    if samples.sample_count() < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let p = samples.frequencies.len();
    let mut out = VarianceProfile {
        frequencies: samples.frequencies.clone(),
        var_re: Vec::with_capacity(p),
        var_im: Vec::with_capacity(p),
        var_abs: Vec::with_capacity(p),
        mean_re: Vec::with_capacity(p),
        mean_im: Vec::with_capacity(p),
    };
    for j in 0..p {
        let col = samples.column(j);
        let (mre, vre) = unbiased_variance(col.iter().map(|c| c.re));
        let (mim, vim) = unbiased_variance(col.iter().map(|c| c.im));
        let (_, vabs) = unbiased_variance(col.iter().map(|c| c.norm()));
        out.var_re.push(vre);
        out.var_im.push(vim);
        out.var_abs.push(vabs);
        out.mean_re.push(mre);
        out.mean_im.push(mim);
    }
    Ok(out)
}

impl VarianceProfile {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["omega", "var_re", "var_im", "var_abs", "mean_re", "mean_im"])?;
        for j in 0..self.frequencies.len() {
            w.write_record(&[
                frequency_label(&self.frequencies[j]),
                format!("{:e}", self.var_re[j]),
                format!("{:e}", self.var_im[j]),
                format!("{:e}", self.var_abs[j]),
                format!("{:e}", self.mean_re[j]),
                format!("{:e}", self.mean_im[j]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Summary written next to the fingerprint CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintReport {
    pub source: SampleSource,
    pub samples: usize,
    pub seed: u64,
    pub mode: CorrelationMode,
    pub fcc: f64,
    pub weighted_fcc: f64,
    pub fcc_stderr: f64,
    pub frequencies: Vec<Vec<i64>>,
    pub degenerate_frequencies: Vec<Vec<i64>>,
}

impl FingerprintReport {
    pub fn new(samples: &CoefficientSamples, fp: &Fingerprint) -> Result<Self> {
        Ok(FingerprintReport {
            source: samples.source.clone(),
            samples: fp.sample_count,
            seed: fp.master_seed,
            mode: fp.mode,
            fcc: fcc(fp)?,
            weighted_fcc: weighted_fcc(fp, Weighting::InverseLinear)?,
            fcc_stderr: fcc_stderr(fp, fp.sample_count)?,
            frequencies: fp.frequencies.clone(),
            degenerate_frequencies: fp.degenerate_frequencies(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::AnsatzKind;
    use crate::statevec::Axis;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy(p: usize, r: f64) -> Fingerprint {
        let freqs = (0..p as i64).map(|w| vec![w]).collect();
        let mut m = vec![r; p * p];
        for i in 0..p {
            m[i * p + i] = 1.0;
        }
        Fingerprint::from_matrix(freqs, m, 100).unwrap()
    }

    fn gaussian_samples(p: usize, m: usize, seed: u64) -> CoefficientSamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..m)
            .map(|_| {
                (0..p)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        CoefficientSamples::from_rows(
            SampleSource::Surrogate { n: p - 1, layers: 1 },
            seed,
            (0..p as i64).map(|w| vec![w]).collect(),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn sampling_is_deterministic_and_shaped() {
        let spec = ModelSpec::new(3, 1, AnsatzKind::C15, vec![Axis::Y]).unwrap();
        let a = sample_coefficients(&spec, 3, 42).unwrap();
        let b = sample_coefficients(&spec, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sample_count(), 3);
        assert_eq!(a.frequencies().len(), 4);
        assert!(sample_coefficients(&spec, 1, 42).is_err());
        let longer = sample_coefficients(&spec, 6, 42).unwrap();
        assert_eq!(longer.truncated(3), a);
    }

    #[test]
    fn single_qubit_top_coefficient_bounded_by_half() {
        // Oracle: dense scan of the first-block angles for the 1-qubit model;
        // |c_1| never exceeds 1/2.
        let spec = ModelSpec::new(1, 1, AnsatzKind::Yzy, vec![Axis::Y]).unwrap();
        let steps = 9;
        let mut worst: f64 = 0.0;
        for a in 0..steps {
            for b in 0..steps {
                for c in 0..steps {
                    let t = |k: usize| k as f64 * std::f64::consts::TAU / steps as f64;
                    let theta = [t(a), t(b), t(c), 0.3, t(b), t(a)];
                    let coeffs = model_coefficients(&spec, &theta).unwrap();
                    worst = worst.max(coeffs.get(&[1]).norm());
                }
            }
        }
        assert!(worst <= 0.5 + 1e-12);
        let s = sample_coefficients(&spec, 500, 1).unwrap();
        assert!(s.column(1).iter().all(|c| c.norm() <= 0.5 + 1e-12));
    }

    #[test]
    fn duplicated_column_fully_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows = (0..50)
            .map(|_| {
                let c = Complex64::new(rng.random(), rng.random());
                vec![c, c * 2.0, Complex64::new(rng.random(), 0.0)]
            })
            .collect();
        let s = CoefficientSamples::from_rows(
            SampleSource::Surrogate { n: 2, layers: 1 },
            0,
            vec![vec![0], vec![1], vec![2]],
            rows,
        )
        .unwrap();
        let fp = pearson_matrix(&s).unwrap();
        assert_abs_diff_eq!(fp.get(1, 0), 1.0, epsilon = 1e-12);
        for i in 0..3 {
            assert_eq!(fp.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(fp.get(i, j), fp.get(j, i));
                assert!((0.0..=1.0).contains(&fp.get(i, j)));
            }
        }
    }

    #[test]
    fn independent_columns_weakly_correlated() {
        // Mean |r| of independent complex columns is about √π / (2√M) ≈ 0.02.
        let fp = pearson_matrix(&gaussian_samples(6, 2000, 9)).unwrap();
        let v = fcc(&fp).unwrap();
        assert!(v < 0.05, "mean off-diagonal {v}");
        let split = pearson_matrix_with(&gaussian_samples(6, 2000, 9), CorrelationMode::SplitReIm).unwrap();
        assert!(fcc(&split).unwrap() < 0.05);
    }

    #[test]
    fn constant_columns() {
        let rows = (0..10)
            .map(|i| vec![Complex64::new(1.0, 0.0), Complex64::new(i as f64, 0.0), Complex64::new((i * i) as f64, 1.0)])
            .collect();
        let s = CoefficientSamples::from_rows(
            SampleSource::Surrogate { n: 2, layers: 1 },
            0,
            vec![vec![0], vec![1], vec![2]],
            rows,
        )
        .unwrap();
        let fp = pearson_matrix(&s).unwrap();
        assert_eq!(fp.degenerate(), &[true, false, false]);
        assert_eq!(fp.get(1, 0), 0.0);
        assert_eq!(fp.get(0, 0), 1.0);
        // Only the (2, 1) pair contributes.
        assert_abs_diff_eq!(fcc(&fp).unwrap(), fp.get(2, 1));
        let vp = variance_profile(&s).unwrap();
        assert_eq!(vp.var_re[0], 0.0);
        assert_eq!(vp.var_abs[0], 0.0);

        let all_const = CoefficientSamples::from_rows(
            SampleSource::Surrogate { n: 1, layers: 1 },
            0,
            vec![vec![0], vec![1]],
            vec![vec![Complex64::new(1.0, 0.0); 2]; 5],
        )
        .unwrap();
        assert!(matches!(pearson_matrix(&all_const), Err(Error::Degenerate(_))));
    }

    #[test]
    fn diagonal_final_entanglers_leave_only_first_harmonic() {
        // The last block of C18 ends in controlled-RZ gates, which commute
        // with the Z measurement, so only ω ∈ {0, 1} carry variance.
        let spec = ModelSpec::new(4, 1, AnsatzKind::C18, vec![Axis::Y]).unwrap();
        let s = sample_coefficients(&spec, 200, 5).unwrap();
        let fp = pearson_matrix(&s).unwrap();
        assert_eq!(fp.degenerate(), &[false, false, true, true, true]);
        let raw = pearson_matrix_floor(&s, CorrelationMode::Complex, 0.0).unwrap();
        assert!(raw.degenerate().iter().all(|&d| !d));
    }

    #[test]
    fn fcc_extremes_and_weighting() {
        assert_eq!(fcc(&toy(5, 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(fcc(&toy(5, 1.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(weighted_fcc(&toy(5, 1.0), Weighting::InverseLinear).unwrap(), 1.0);
        let fp = toy(4, 0.37);
        assert_eq!(weighted_fcc(&fp, Weighting::Uniform).unwrap(), fcc(&fp).unwrap());
        assert!(fcc(&toy(1, 0.0)).is_err());
    }

    #[test]
    fn inverse_linear_discounts_high_frequency_pairs() {
        // Frequencies 0, 1, 2 with correlation only between 1 and 2.
        // uniform = 1/3; inverse-linear = (1/3) / (1/1 + 1/2 + 1/3) = 2/11.
        let mut m = vec![0.0; 9];
        for i in 0..3 {
            m[i * 3 + i] = 1.0;
        }
        m[2 * 3 + 1] = 1.0;
        m[3 + 2] = 1.0;
        let fp = Fingerprint::from_matrix(vec![vec![0], vec![1], vec![2]], m, 10).unwrap();
        let uni = weighted_fcc(&fp, Weighting::Uniform).unwrap();
        let lin = weighted_fcc(&fp, Weighting::InverseLinear).unwrap();
        assert_abs_diff_eq!(uni, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lin, 2.0 / 11.0, epsilon = 1e-15);
        assert!(lin < uni);
    }

    #[test]
    fn stderr_formula() {
        assert_eq!(fcc_stderr(&toy(4, 1.0), 50).unwrap(), 0.0);
        assert_abs_diff_eq!(fcc_stderr(&toy(4, 0.0), 101).unwrap(), 0.01, epsilon = 1e-15);
        let ratio = fcc_stderr(&toy(4, 0.3), 1001).unwrap() / fcc_stderr(&toy(4, 0.3), 101).unwrap();
        assert_abs_diff_eq!(ratio, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn surrogate_properties() {
        let a = surrogate_samples(3, 1, 20, 5).unwrap();
        assert_eq!(a, surrogate_samples(3, 1, 20, 5).unwrap());
        assert_eq!(a.frequencies().len(), 4);

        let s = surrogate_samples(6, 1, 5000, 11).unwrap();
        let vp = variance_profile(&s).unwrap();
        let total = 4f64.powi(6);
        for (j, w) in vp.frequencies.iter().enumerate() {
            let want = degeneracy(6, 1, w[0]).unwrap() as f64 / total;
            let got = vp.var_re[j] + vp.var_im[j];
            assert!((got / want - 1.0).abs() < 0.2, "ω={w:?} got {got} want {want}");
        }
    }

    #[test]
    fn fingerprint_csv_shape() {
        let spec = ModelSpec::new(2, 1, AnsatzKind::C15, vec![Axis::Y]).unwrap();
        let s = sample_coefficients(&spec, 50, 3).unwrap();
        let fp = pearson_matrix(&s).unwrap();
        let mut buf = Vec::new();
        fp.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "omega,0,1,2");
        let report = FingerprintReport::new(&s, &fp).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"fcc\""));
    }
}
