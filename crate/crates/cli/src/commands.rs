//! Subcommand implementations. Each command resolves its configuration
//! first (failures there are configuration errors) and then runs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use qfm_core::expressibility::{expressibility, expressibility_from_samples, sample_fidelities, DEFAULT_BINS};
use qfm_core::fingerprint::{
    fcc, fcc_stderr, frequency_label, pearson_matrix_floor, sample_coefficients, surrogate_samples,
    variance_profile, weighted_fcc, FingerprintReport, VARIANCE_FLOOR,
};
use qfm_core::fourier_data::{random_complex_target, random_target, make_dataset};
use qfm_core::hep::{generate_synthetic_events, read_events_csv, train_hep, HepConfig, KL_BINS};
use qfm_core::trainer::{experiment_grid, train, GridConfig, TrainConfig};
use qfm_core::{AnsatzKind, CoefficientSamples, Fingerprint, GradientMethod, ModelSpec, Weighting};

use crate::config::{Format, OneOrMany, RunConfig};
use crate::heatmap::render_heatmap;
use crate::Failure;

fn config_err<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Config)
}

fn runtime<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Runtime)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let mut w = create(dir, name)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

/// Creates the output directory and writes the resolved configuration.
fn prepare_out(cfg: &RunConfig) -> Result<std::path::PathBuf> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut text = cfg.to_json()?;
    text.push('\n');
    write_text(&dir, "config.json", &text)?;
    Ok(dir)
}

fn single_seed(list: &Option<OneOrMany<u64>>, what: &str) -> Result<u64> {
    match list.as_ref().map(|l| l.to_vec()).unwrap_or_else(|| vec![0]).as_slice() {
        [s] => Ok(*s),
        l => bail!("this command takes one {what}, got {}", l.len()),
    }
}

fn check_samples(m: usize) -> Result<()> {
    if m < 2 {
        bail!("need at least 2 samples, got {m}");
    }
    Ok(())
}

struct FingerprintPlan {
    spec: Option<ModelSpec>,
    n: usize,
    layers: usize,
    samples: usize,
    seed: u64,
    floor: f64,
    mode: qfm_core::CorrelationMode,
    format: Format,
}

fn resolve_fingerprint(cfg: &mut RunConfig, force_surrogate: bool) -> Result<FingerprintPlan> {
    let surrogate = force_surrogate || cfg.surrogate.unwrap_or(false);
    let n = cfg.single_qubits(4)?;
    let layers = cfg.layers.unwrap_or(1);
    let preset = cfg.preset.unwrap_or_default();
    let (spec, default_samples) = if surrogate {
        if cfg.dims.unwrap_or(1) != 1 || cfg.axes.as_ref().is_some_and(|a| a.to_vec().len() != 1) {
            bail!("surrogate coefficients are one-dimensional");
        }
        if cfg.ansatz.is_some() {
            bail!("surrogate sampling does not use an ansatz");
        }
        // Parameter-free: size it like a C15 model of the same shape.
        let reference = ModelSpec::new(n.max(2), layers, AnsatzKind::C15, vec![qfm_core::Axis::Y])?;
        (None, preset.fingerprint_samples(&reference))
    } else {
        let spec = cfg.model_spec(cfg.single_ansatz(AnsatzKind::C15)?, n)?;
        cfg.record_spec(&spec);
        let m = preset.fingerprint_samples(&spec);
        (Some(spec), m)
    };
    if surrogate {
        if n == 0 || layers == 0 {
            bail!("qubits and layers must be positive");
        }
        cfg.qubits = Some(OneOrMany::One(n));
        cfg.layers = Some(layers);
        cfg.surrogate = Some(true);
    }
    let samples = cfg.samples.unwrap_or(default_samples);
    check_samples(samples)?;
    let floor = cfg.variance_floor.unwrap_or(VARIANCE_FLOOR);
    if !(floor >= 0.0) {
        bail!("variance floor must be non-negative");
    }
    let plan = FingerprintPlan {
        spec,
        n,
        layers,
        samples,
        seed: cfg.seed.unwrap_or(0),
        floor,
        mode: cfg.mode.unwrap_or_default(),
        format: cfg.format.unwrap_or_default(),
    };
    cfg.preset = Some(preset);
    cfg.samples = Some(plan.samples);
    cfg.seed = Some(plan.seed);
    cfg.variance_floor = Some(plan.floor);
    cfg.mode = Some(plan.mode);
    cfg.format = Some(plan.format);
    cfg.out = Some(cfg.out_dir());
    Ok(plan)
}

fn draw(plan: &FingerprintPlan) -> Result<CoefficientSamples> {
    Ok(match &plan.spec {
        Some(spec) => sample_coefficients(spec, plan.samples, plan.seed)?,
        None => surrogate_samples(plan.n, plan.layers, plan.samples, plan.seed)?,
    })
}

fn write_fingerprint(dir: &Path, samples: &CoefficientSamples, fp: &Fingerprint, format: Format) -> Result<FingerprintReport> {
    match format {
        Format::Csv => {
            let mut w = create(dir, "fingerprint.csv")?;
            fp.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Matrix<'a> {
                frequencies: &'a [Vec<i64>],
                matrix: Vec<Vec<f64>>,
            }
            write_json(dir, "fingerprint.json", &Matrix { frequencies: fp.frequencies(), matrix: fp.to_rows() })?;
        }
    }
    let report = FingerprintReport::new(samples, fp)?;
    write_json(dir, "fingerprint_meta.json", &report)?;
    let labels: Vec<String> = fp.frequencies().iter().map(|w| frequency_label(w)).collect();
    if labels.len() >= 2 {
        write_text(dir, "fingerprint.svg", &render_heatmap(&fp.to_rows(), &labels)?)?;
    }
    Ok(report)
}

pub fn fingerprint(mut cfg: RunConfig, force_surrogate: bool) -> std::result::Result<(), Failure> {
    let plan = config_err(resolve_fingerprint(&mut cfg, force_surrogate))?;
    let dir = config_err(prepare_out(&cfg))?;
    let report = runtime((|| {
        let samples = draw(&plan)?;
        let fp = pearson_matrix_floor(&samples, plan.mode, plan.floor)?;
        write_fingerprint(&dir, &samples, &fp, plan.format)
    })())?;
    println!(
        "fcc = {:.6} (stderr {:.2e}), weighted = {:.6}, {} samples, {} degenerate frequencies -> {}",
        report.fcc,
        report.fcc_stderr,
        report.weighted_fcc,
        report.samples,
        report.degenerate_frequencies.len(),
        dir.display()
    );
    Ok(())
}

/// Per-ansatz FCC table.
pub fn fcc_table(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let (specs, samples, seed, floor, mode, format) = config_err((|| {
        let ansatzes = cfg.ansatzes(&[AnsatzKind::C15])?;
        let n = cfg.single_qubits(4)?;
        let preset = cfg.preset.unwrap_or_default();
        let specs = ansatzes.iter().map(|&a| cfg.model_spec(a, n)).collect::<Result<Vec<_>>>()?;
        let samples: Vec<usize> = specs.iter().map(|s| cfg.samples.unwrap_or(preset.fingerprint_samples(s))).collect();
        samples.iter().try_for_each(|&m| check_samples(m))?;
        let floor = cfg.variance_floor.unwrap_or(VARIANCE_FLOOR);
        cfg.ansatz = Some(OneOrMany::Many(ansatzes.iter().map(|a| a.name().to_string()).collect()));
        cfg.qubits = Some(OneOrMany::One(n));
        cfg.layers = Some(specs[0].layers);
        cfg.dims = Some(specs[0].dims());
        cfg.axes = Some(OneOrMany::Many(specs[0].axes.iter().map(|a| a.to_string()).collect()));
        cfg.preset = Some(preset);
        cfg.seed = Some(cfg.seed.unwrap_or(0));
        cfg.variance_floor = Some(floor);
        cfg.mode = Some(cfg.mode.unwrap_or_default());
        cfg.format = Some(cfg.format.unwrap_or_default());
        cfg.out = Some(cfg.out_dir());
        Ok((specs, samples, cfg.seed.unwrap(), floor, cfg.mode.unwrap(), cfg.format.unwrap()))
    })())?;
    let dir = config_err(prepare_out(&cfg))?;
    let rows = runtime((|| {
        let mut rows = Vec::new();
        for (spec, &m) in specs.iter().zip(&samples) {
            let s = sample_coefficients(spec, m, seed)?;
            let fp = pearson_matrix_floor(&s, mode, floor)?;
            rows.push(FccRow {
                ansatz: spec.ansatz,
                n: spec.n,
                layers: spec.layers,
                dims: spec.dims(),
                samples: m,
                fcc: fcc(&fp)?,
                weighted_fcc: weighted_fcc(&fp, Weighting::InverseLinear)?,
                fcc_stderr: fcc_stderr(&fp, m)?,
                degenerate: fp.degenerate().iter().filter(|&&d| d).count(),
            });
        }
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(create(&dir, "fcc.csv")?);
                for r in &rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            Format::Json => write_json(&dir, "fcc.json", &rows)?,
        }
        Ok(rows)
    })())?;
    for r in &rows {
        println!("{:<15} fcc = {:.6} ± {:.2e}  weighted = {:.6}", r.ansatz.name(), r.fcc, r.fcc_stderr, r.weighted_fcc);
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct FccRow {
    ansatz: AnsatzKind,
    n: usize,
    #[serde(rename = "L")]
    layers: usize,
    #[serde(rename = "D")]
    dims: usize,
    samples: usize,
    fcc: f64,
    weighted_fcc: f64,
    fcc_stderr: f64,
    degenerate: usize,
}

pub fn expressibility_cmd(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let (spec, pairs, bins, seed) = config_err((|| {
        let n = cfg.single_qubits(4)?;
        let spec = cfg.model_spec(cfg.single_ansatz(AnsatzKind::C15)?, n)?;
        cfg.record_spec(&spec);
        let preset = cfg.preset.unwrap_or_default();
        // `--samples` and `--pairs` both name the pair count here.
        let pairs = cfg.pairs.or(cfg.samples).unwrap_or(preset.expressibility_pairs(&spec));
        if pairs == 0 {
            bail!("need at least one fidelity pair");
        }
        let bins = cfg.bins.unwrap_or(DEFAULT_BINS);
        if bins < 2 {
            bail!("need at least 2 bins, got {bins}");
        }
        cfg.preset = Some(preset);
        cfg.pairs = Some(pairs);
        cfg.samples = None;
        cfg.bins = Some(bins);
        cfg.seed = Some(cfg.seed.unwrap_or(0));
        cfg.out = Some(cfg.out_dir());
        Ok((spec, pairs, bins, cfg.seed.unwrap()))
    })())?;
    let dir = config_err(prepare_out(&cfg))?;
    let res = runtime((|| {
        let res = expressibility(&spec, pairs, bins, seed)?;
        #[derive(Serialize)]
        struct Summary<'a> {
            spec: &'a ModelSpec,
            kl: f64,
            complement: f64,
            bins: usize,
            pairs: usize,
            seed: u64,
        }
        write_json(
            &dir,
            "expressibility.json",
            &Summary { spec: &spec, kl: res.kl, complement: res.complement, bins, pairs, seed },
        )?;
        let mut w = create(&dir, "expressibility_histogram.csv")?;
        res.histogram.write_csv(&mut w, spec.n)?;
        w.flush()?;
        Ok(res)
    })())?;
    println!("KL to Haar = {:.6}, exp(-KL) = {:.6} over {} pairs", res.kl, res.complement, res.pairs);
    Ok(())
}

pub fn variance(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let plan = config_err(resolve_fingerprint(&mut cfg, false))?;
    cfg.variance_floor = None;
    cfg.mode = None;
    cfg.format = None;
    let dir = config_err(prepare_out(&cfg))?;
    runtime((|| {
        let samples = draw(&plan)?;
        let mut w = create(&dir, "variance.csv")?;
        variance_profile(&samples)?.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    })())?;
    println!("variance profile -> {}", dir.join("variance.csv").display());
    Ok(())
}

pub fn train_fs(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let (spec, tc, model_seed, data_seed, complex) = config_err((|| {
        let n = cfg.single_qubits(4)?;
        let spec = cfg.model_spec(cfg.single_ansatz(AnsatzKind::C15)?, n)?;
        cfg.record_spec(&spec);
        let defaults = TrainConfig::default();
        let tc = TrainConfig {
            epochs: cfg.epochs.unwrap_or(defaults.epochs),
            lr: cfg.lr.unwrap_or(defaults.lr),
            gradient: cfg.gradient.unwrap_or(defaults.gradient),
        };
        if tc.epochs == 0 || !(tc.lr > 0.0) {
            bail!("epochs and learning rate must be positive");
        }
        tc.gradient.resolve(spec.ansatz)?;
        let model_seed = single_seed(&cfg.model_seeds, "model seed")?;
        let data_seed = single_seed(&cfg.data_seeds, "data seed")?;
        let complex = cfg.complex_targets.unwrap_or(false);
        cfg.epochs = Some(tc.epochs);
        cfg.lr = Some(tc.lr);
        cfg.gradient = Some(tc.gradient);
        cfg.model_seeds = Some(OneOrMany::One(model_seed));
        cfg.data_seeds = Some(OneOrMany::One(data_seed));
        cfg.complex_targets = Some(complex);
        cfg.out = Some(cfg.out_dir());
        Ok((spec, tc, model_seed, data_seed, complex))
    })())?;
    let dir = config_err(prepare_out(&cfg))?;
    let result = runtime((|| {
        let band = spec.max_frequency();
        let target = if complex {
            random_complex_target(band, spec.dims(), data_seed)?
        } else {
            random_target(band, spec.dims(), data_seed)?
        };
        let data = make_dataset(&target)?;
        let mut w = create(&dir, "dataset.csv")?;
        data.write_csv(&mut w)?;
        w.flush()?;
        let result = train(&spec, &data, &tc, model_seed)?;
        let mut w = csv::Writer::from_writer(create(&dir, "history.csv")?);
        w.write_record(["epoch", "mse"])?;
        for (i, l) in result.history.iter().enumerate() {
            w.write_record(&[i.to_string(), format!("{l:e}")])?;
        }
        w.flush()?;
        #[derive(Serialize)]
        struct Out<'a> {
            spec: &'a ModelSpec,
            train: &'a TrainConfig,
            gradient: GradientMethod,
            #[serde(flatten)]
            result: &'a qfm_core::TrainResult,
        }
        write_json(
            &dir,
            "train_fs.json",
            &Out { spec: &spec, train: &tc, gradient: tc.gradient.resolve(spec.ansatz)?, result: &result },
        )?;
        Ok(result)
    })())?;
    println!("MSE {:.6e} -> {:.6e} after {} epochs", result.initial_mse, result.final_mse, tc.epochs);
    Ok(())
}

pub fn train_hep_cmd(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let (hc, bins) = config_err((|| {
        let d = HepConfig::default();
        if cfg.dims.is_some_and(|x| x != 2) || cfg.axes.is_some() {
            bail!("the event model always uses two inputs on X and Y encodings");
        }
        let hc = HepConfig {
            ansatz: cfg.single_ansatz(d.ansatz)?,
            n: cfg.single_qubits(d.n)?,
            layers: cfg.layers.unwrap_or(d.layers),
            events: cfg.events.unwrap_or(d.events),
            split: d.split,
            k: cfg.grid,
            batch: cfg.batch.unwrap_or(d.batch),
            epochs: cfg.epochs.unwrap_or(d.epochs),
            lr: cfg.lr.unwrap_or(d.lr),
            bins: d.bins,
            gradient: cfg.gradient.unwrap_or(d.gradient),
            seed: cfg.seed.unwrap_or(d.seed),
            model_seed: single_seed(&cfg.model_seeds, "model seed")?,
        };
        hc.spec()?;
        hc.gradient.resolve(hc.ansatz)?;
        let bins = cfg.bins.unwrap_or(KL_BINS);
        if bins == 0 {
            bail!("bins must be positive");
        }
        if let Some(p) = &cfg.input {
            if !p.is_file() {
                bail!("input {} does not exist", p.display());
            }
            cfg.events = None;
        } else {
            cfg.events = Some(hc.events);
        }
        cfg.ansatz = Some(OneOrMany::One(hc.ansatz.name().to_string()));
        cfg.qubits = Some(OneOrMany::One(hc.n));
        cfg.layers = Some(hc.layers);
        cfg.grid = Some(hc.grid_size());
        cfg.batch = Some(hc.batch);
        cfg.epochs = Some(hc.epochs);
        cfg.lr = Some(hc.lr);
        cfg.gradient = Some(hc.gradient);
        cfg.seed = Some(hc.seed);
        cfg.model_seeds = Some(OneOrMany::One(hc.model_seed));
        cfg.bins = Some(bins);
        cfg.out = Some(cfg.out_dir());
        let hc = HepConfig { k: Some(hc.grid_size()), ..hc };
        Ok((hc, bins))
    })())?;
    let dir = config_err(prepare_out(&cfg))?;
    let input = cfg.input.clone();
    let report = runtime((|| {
        let events = match &input {
            Some(p) => read_events_csv(File::open(p).with_context(|| format!("opening {}", p.display()))?)?,
            None => generate_synthetic_events(hc.events, hc.seed)?,
        };
        let outcome = train_hep(&events, &hc)?;
        write_json(&dir, "hep_report.json", &outcome.report)?;
        let mut w = create(&dir, "abs_error_histogram.csv")?;
        outcome.write_error_histogram(&mut w, bins)?;
        w.flush()?;
        let mut w = csv::Writer::from_writer(create(&dir, "hep_history.csv")?);
        w.write_record(["epoch", "val_loss"])?;
        for (i, l) in outcome.report.val_history.iter().enumerate() {
            w.write_record(&[(i + 1).to_string(), format!("{l:e}")])?;
        }
        w.flush()?;
        Ok(outcome.report)
    })())?;
    println!(
        "validation loss {:.6} -> {:.6}; test |error| {:.4} ± {:.4}",
        report.initial_val_loss, report.final_val_loss, report.test.abs_error_mean, report.test.abs_error_std
    );
    Ok(())
}

pub fn experiment(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let (gc, format) = config_err((|| {
        let ansatzes = cfg.ansatzes(&AnsatzKind::ALL)?;
        let n = cfg.single_qubits(4)?;
        let specs = ansatzes.iter().map(|&a| cfg.model_spec(a, n)).collect::<Result<Vec<_>>>()?;
        let preset = cfg.preset.unwrap_or_default();
        // One sample budget for every row, sized by the largest ansatz.
        let samples = cfg
            .samples
            .unwrap_or_else(|| specs.iter().map(|s| preset.fingerprint_samples(s)).max().unwrap_or(0));
        let pairs = cfg
            .pairs
            .unwrap_or_else(|| specs.iter().map(|s| preset.expressibility_pairs(s)).max().unwrap_or(0));
        if samples == 1 {
            bail!("need 0 (skip) or at least 2 fingerprint samples");
        }
        let d = TrainConfig::default();
        let mut gc = GridConfig::new(ansatzes.clone(), n, specs[0].layers, specs[0].axes.clone());
        gc.train = TrainConfig {
            epochs: cfg.epochs.unwrap_or(d.epochs),
            lr: cfg.lr.unwrap_or(d.lr),
            gradient: cfg.gradient.unwrap_or(d.gradient),
        };
        if gc.train.epochs == 0 || !(gc.train.lr > 0.0) {
            bail!("epochs and learning rate must be positive");
        }
        for a in &ansatzes {
            gc.train.gradient.resolve(*a)?;
        }
        if let Some(s) = &cfg.model_seeds {
            gc.model_seeds = s.to_vec();
        }
        if let Some(s) = &cfg.data_seeds {
            gc.data_seeds = s.to_vec();
        }
        if gc.model_seeds.is_empty() || gc.data_seeds.is_empty() {
            bail!("need at least one model seed and one data seed");
        }
        gc.fingerprint_samples = samples;
        gc.expressibility_pairs = pairs;
        gc.bins = cfg.bins.unwrap_or(DEFAULT_BINS);
        gc.seed = cfg.seed.unwrap_or(0);
        gc.complex_targets = cfg.complex_targets.unwrap_or(false);

        cfg.ansatz = Some(OneOrMany::Many(ansatzes.iter().map(|a| a.name().to_string()).collect()));
        cfg.qubits = Some(OneOrMany::One(n));
        cfg.layers = Some(gc.layers);
        cfg.dims = Some(gc.axes.len());
        cfg.axes = Some(OneOrMany::Many(gc.axes.iter().map(|a| a.to_string()).collect()));
        cfg.preset = Some(preset);
        cfg.samples = Some(samples);
        cfg.pairs = Some(pairs);
        cfg.bins = Some(gc.bins);
        cfg.seed = Some(gc.seed);
        cfg.epochs = Some(gc.train.epochs);
        cfg.lr = Some(gc.train.lr);
        cfg.gradient = Some(gc.train.gradient);
        cfg.model_seeds = Some(OneOrMany::Many(gc.model_seeds.clone()));
        cfg.data_seeds = Some(OneOrMany::Many(gc.data_seeds.clone()));
        cfg.complex_targets = Some(gc.complex_targets);
        cfg.format = Some(cfg.format.unwrap_or_default());
        cfg.out = Some(cfg.out_dir());
        Ok((gc, cfg.format.unwrap()))
    })())?;
    let dir = config_err(prepare_out(&cfg))?;
    let table = runtime((|| {
        let table = experiment_grid(&gc)?;
        match format {
            Format::Csv => {
                let mut w = create(&dir, "results.csv")?;
                table.write_csv(&mut w)?;
                w.flush()?;
            }
            Format::Json => {
                let mut text = table.to_json()?;
                text.push('\n');
                write_text(&dir, "results.json", &text)?;
            }
        }
        let mut w = csv::Writer::from_writer(create(&dir, "scatter.csv")?);
        w.write_record(["ansatz", "fcc", "expressibility_kl", "mean_mse"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &table.rows {
            w.write_record(&[r.ansatz.name().to_string(), opt(r.fcc), opt(r.expressibility_kl), format!("{:e}", r.mean_mse)])?;
        }
        w.flush()?;
        Ok(table)
    })())?;
    for r in &table.rows {
        println!("{:<15} mean MSE {:.4e} ± {:.2e} over {} runs", r.ansatz.name(), r.mean_mse, r.std_mse, r.runs);
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BenchRow {
    ansatz: AnsatzKind,
    n: usize,
    params: usize,
    fcc_samples: usize,
    fcc_seconds: f64,
    expr_pairs: usize,
    expr_seconds: f64,
    fcc: f64,
    expressibility_kl: f64,
}

/// Wall-clock cost of FCC against expressibility, per qubit count. Both
/// metrics draw parameters from the same seeded stream; by default they use
/// the same number of draws.
pub fn bench(mut cfg: RunConfig) -> std::result::Result<(), Failure> {
    let plan = config_err((|| {
        let ansatzes = cfg.ansatzes(&[AnsatzKind::C15])?;
        let qubits = cfg.qubit_list(&[2, 3, 4]);
        if qubits.is_empty() {
            bail!("need at least one qubit count");
        }
        let preset = cfg.preset.unwrap_or_default();
        let mut plan = Vec::new();
        for &n in &qubits {
            for &a in &ansatzes {
                let spec = cfg.model_spec(a, n)?;
                let m = cfg.samples.unwrap_or(preset.fingerprint_samples(&spec));
                check_samples(m)?;
                // Pair i uses draws 2i and 2i + 1, so M / 2 pairs consume
                // exactly the parameter vectors behind the fingerprint.
                let pairs = cfg.pairs.unwrap_or(m / 2);
                if pairs == 0 {
                    bail!("need at least one fidelity pair");
                }
                plan.push((spec, m, pairs));
            }
        }
        cfg.ansatz = Some(OneOrMany::Many(ansatzes.iter().map(|a| a.name().to_string()).collect()));
        cfg.qubits = Some(OneOrMany::Many(qubits));
        cfg.layers = Some(plan[0].0.layers);
        cfg.dims = Some(plan[0].0.dims());
        cfg.axes = Some(OneOrMany::Many(plan[0].0.axes.iter().map(|a| a.to_string()).collect()));
        cfg.preset = Some(preset);
        cfg.seed = Some(cfg.seed.unwrap_or(0));
        cfg.bins = Some(cfg.bins.unwrap_or(DEFAULT_BINS));
        cfg.variance_floor = Some(cfg.variance_floor.unwrap_or(VARIANCE_FLOOR));
        cfg.mode = Some(cfg.mode.unwrap_or_default());
        cfg.format = Some(cfg.format.unwrap_or_default());
        cfg.out = Some(cfg.out_dir());
        Ok(plan)
    })())?;
    let (seed, bins, floor, mode, format) = (
        cfg.seed.unwrap(),
        cfg.bins.unwrap(),
        cfg.variance_floor.unwrap(),
        cfg.mode.unwrap(),
        cfg.format.unwrap(),
    );
    let dir = config_err(prepare_out(&cfg))?;
    let rows = runtime((|| {
        let mut rows = Vec::new();
        for (spec, m, pairs) in &plan {
            let t = Instant::now();
            let s = sample_coefficients(spec, *m, seed)?;
            let fp = pearson_matrix_floor(&s, mode, floor)?;
            let f = fcc(&fp)?;
            let fcc_seconds = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let fid = sample_fidelities(spec, *pairs, seed)?;
            let e = expressibility_from_samples(&fid, spec.n, bins, seed)?;
            let expr_seconds = t.elapsed().as_secs_f64();
            rows.push(BenchRow {
                ansatz: spec.ansatz,
                n: spec.n,
                params: spec.param_count(),
                fcc_samples: *m,
                fcc_seconds,
                expr_pairs: *pairs,
                expr_seconds,
                fcc: f,
                expressibility_kl: e.kl,
            });
        }
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(create(&dir, "bench.csv")?);
                for r in &rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            Format::Json => write_json(&dir, "bench.json", &rows)?,
        }
        Ok(rows)
    })())?;
    println!("{:<15} {:>3} {:>8} {:>10} {:>8} {:>10}", "ansatz", "n", "samples", "fcc s", "pairs", "expr s");
    for r in &rows {
        println!(
            "{:<15} {:>3} {:>8} {:>10.3} {:>8} {:>10.3}",
            r.ansatz.name(),
            r.n,
            r.fcc_samples,
            r.fcc_seconds,
            r.expr_pairs,
            r.expr_seconds
        );
    }
    Ok(())
}
