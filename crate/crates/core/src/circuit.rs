//! The ansatz zoo, Pauli feature maps and the layered data re-uploading model
//! `U(x, θ) = W⁽ᴸ⁺¹⁾ S(x) W⁽ᴸ⁾ … S(x) W⁽¹⁾`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{Axis, Gate, StateVector, MAX_QUBITS};

/// The eight trainable blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnsatzKind {
    #[serde(rename = "YZY")]
    Yzy,
    #[serde(rename = "YZY_ENTANGLING")]
    YzyEntangling,
    #[serde(rename = "HEA")]
    Hea,
    #[serde(rename = "C15")]
    C15,
    #[serde(rename = "C16")]
    C16,
    #[serde(rename = "C17")]
    C17,
    #[serde(rename = "C18")]
    C18,
    #[serde(rename = "C19")]
    C19,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 8] = [
        AnsatzKind::Yzy,
        AnsatzKind::YzyEntangling,
        AnsatzKind::Hea,
        AnsatzKind::C15,
        AnsatzKind::C16,
        AnsatzKind::C17,
        AnsatzKind::C18,
        AnsatzKind::C19,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Yzy => "YZY",
            AnsatzKind::YzyEntangling => "YZY_ENTANGLING",
            AnsatzKind::Hea => "HEA",
            AnsatzKind::C15 => "C15",
            AnsatzKind::C16 => "C16",
            AnsatzKind::C17 => "C17",
            AnsatzKind::C18 => "C18",
            AnsatzKind::C19 => "C19",
        }
    }

    /// Smallest register the block is defined on.
    pub fn min_qubits(self) -> usize {
        match self {
            AnsatzKind::Yzy => 1,
            _ => 2,
        }
    }

    /// Parameters per block on `n` qubits.
    pub fn block_param_count(self, n: usize) -> usize {
        match self {
            AnsatzKind::Yzy | AnsatzKind::YzyEntangling | AnsatzKind::Hea => 3 * n,
            AnsatzKind::C15 => 2 * n,
            AnsatzKind::C16 | AnsatzKind::C17 => 3 * n - 1,
            AnsatzKind::C18 | AnsatzKind::C19 => 3 * n,
        }
    }

    /// True when every parameterized gate is an uncontrolled Pauli rotation,
    /// so the two-term parameter-shift rule is exact.
    pub fn supports_param_shift(self) -> bool {
        matches!(
            self,
            AnsatzKind::Yzy | AnsatzKind::YzyEntangling | AnsatzKind::Hea | AnsatzKind::C15
        )
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_uppercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        let kind = match key.as_str() {
            "YZY" | "CIRCUITYZY" => AnsatzKind::Yzy,
            "YZYENTANGLING" | "CIRCUITYZYENTANGLING" => AnsatzKind::YzyEntangling,
            "HEA" | "HARDWAREEFFICIENT" | "HARDWAREEFFICIENTANSATZ" => AnsatzKind::Hea,
            "C15" | "CIRCUIT15" => AnsatzKind::C15,
            "C16" | "CIRCUIT16" => AnsatzKind::C16,
            "C17" | "CIRCUIT17" => AnsatzKind::C17,
            "C18" | "CIRCUIT18" => AnsatzKind::C18,
            "C19" | "CIRCUIT19" => AnsatzKind::C19,
            _ => return Err(Error::InvalidArgument(format!("unknown ansatz `{s}`"))),
        };
        Ok(kind)
    }
}

/// Measured observable. Only the mean magnetization is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Observable {
    #[default]
    #[serde(rename = "mean_z")]
    MeanZ,
}

/// Model definition: register size, encoding layers, trainable block and one
/// Pauli encoding axis per input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub layers: usize,
    pub ansatz: AnsatzKind,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub observable: Observable,
}

impl ModelSpec {
    pub fn new(n: usize, layers: usize, ansatz: AnsatzKind, axes: Vec<Axis>) -> Result<Self> {
        let spec = ModelSpec { n, layers, ansatz, axes, observable: Observable::MeanZ };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < self.ansatz.min_qubits() {
            return Err(Error::InvalidArgument(format!(
                "{} needs at least {} qubits, got {}",
                self.ansatz,
                self.ansatz.min_qubits(),
                self.n
            )));
        }
        if self.n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("{} qubits exceeds {MAX_QUBITS}", self.n)));
        }
        if self.layers == 0 {
            return Err(Error::InvalidArgument("at least one encoding layer is required".into()));
        }
        if self.axes.is_empty() {
            return Err(Error::InvalidArgument("feature map needs at least one axis".into()));
        }
        Ok(())
    }

    /// Input dimension `D`.
    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    /// Highest frequency per input axis, `nL`.
    pub fn max_frequency(&self) -> usize {
        self.n * self.layers
    }

    pub fn block_param_count(&self) -> usize {
        self.ansatz.block_param_count(self.n)
    }

    /// Total trainable parameters, `(L+1)` blocks.
    pub fn param_count(&self) -> usize {
        (self.layers + 1) * self.block_param_count()
    }

    /// Draws every parameter i.i.d. from `U[0, 2π)`.
    pub fn random_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.param_count())
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect()
    }

    pub fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                got: theta.len(),
            });
        }
        Ok(())
    }

    pub fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: x.len() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// `(L+1) ×` the per-block count for `ansatz` on `n` qubits.
pub fn param_count(ansatz: AnsatzKind, n: usize, layers: usize) -> Result<usize> {
    if n < ansatz.min_qubits() {
        return Err(Error::InvalidArgument(format!(
            "{ansatz} needs at least {} qubits, got {n}",
            ansatz.min_qubits()
        )));
    }
    Ok((layers + 1) * ansatz.block_param_count(n))
}

/// Gate list of one trainable block.
///
/// For four qubits the lists reproduce the reference circuit drawings gate by
/// gate. Other register sizes follow the same wiring rules: rotation columns
/// extend to every wire, C16/C17 pair neighbours in two stages (`(1→0), (3→2),
/// …` then `(2→1), (4→3), …`), and the ring entanglers close with a wrap gate.
pub fn build_ansatz_block(ansatz: AnsatzKind, n: usize, params: &[f64]) -> Result<Vec<Gate>> {
    if n < ansatz.min_qubits() {
        return Err(Error::InvalidArgument(format!(
            "{ansatz} needs at least {} qubits, got {n}",
            ansatz.min_qubits()
        )));
    }
    let expected = ansatz.block_param_count(n);
    if params.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: params.len() });
    }
    let mut gates = Vec::with_capacity(4 * n);
    match ansatz {
        AnsatzKind::Yzy | AnsatzKind::YzyEntangling | AnsatzKind::Hea => {
            for q in 0..n {
                gates.push(Gate::ry(q, params[3 * q]));
                gates.push(Gate::rz(q, params[3 * q + 1]));
                gates.push(Gate::ry(q, params[3 * q + 2]));
            }
            if ansatz == AnsatzKind::YzyEntangling {
                for c in 0..n {
                    for t in c + 1..n {
                        gates.push(Gate::cnot(c, t));
                    }
                }
            } else if ansatz == AnsatzKind::Hea {
                for start in [0, 1] {
                    for c in (start..n.saturating_sub(1)).step_by(2) {
                        gates.push(Gate::cnot(c, c + 1));
                    }
                }
                gates.push(Gate::cnot(n - 1, 0));
            }
        }
        AnsatzKind::C15 => {
            for q in 0..n {
                gates.push(Gate::ry(q, params[q]));
            }
            for c in (0..n).rev() {
                gates.push(Gate::cnot(c, (c + 1) % n));
            }
            for q in 0..n {
                gates.push(Gate::ry(q, params[n + q]));
            }
            for c in std::iter::once(n - 1).chain(0..n - 1) {
                gates.push(Gate::cnot(c, (c + n - 1) % n));
            }
        }
        AnsatzKind::C16 | AnsatzKind::C17 => {
            let axis = if ansatz == AnsatzKind::C16 { Axis::Z } else { Axis::X };
            push_xz_columns(&mut gates, n, params);
            let mut k = 2 * n;
            for first in [1, 2] {
                for c in (first..n).step_by(2) {
                    gates.push(Gate::CRot { axis, control: c, target: c - 1, angle: params[k] });
                    k += 1;
                }
            }
        }
        AnsatzKind::C18 | AnsatzKind::C19 => {
            let axis = if ansatz == AnsatzKind::C18 { Axis::Z } else { Axis::X };
            push_xz_columns(&mut gates, n, params);
            for (k, c) in (0..n).rev().enumerate() {
                gates.push(Gate::CRot {
                    axis,
                    control: c,
                    target: (c + 1) % n,
                    angle: params[2 * n + k],
                });
            }
        }
    }
    Ok(gates)
}

fn push_xz_columns(gates: &mut Vec<Gate>, n: usize, params: &[f64]) {
    for q in 0..n {
        gates.push(Gate::rx(q, params[2 * q]));
        gates.push(Gate::rz(q, params[2 * q + 1]));
    }
}

/// Encoding column `S(x)`: for each input dimension `d`, `R_{axis_d}(x_d)` on
/// every qubit.
pub fn encoding_gates(spec: &ModelSpec, x: &[f64]) -> Result<Vec<Gate>> {
    spec.check_input(x)?;
    let mut gates = Vec::with_capacity(spec.n * x.len());
    for (&axis, &xd) in spec.axes.iter().zip(x) {
        for q in 0..spec.n {
            gates.push(Gate::Rot { axis, target: q, angle: xd });
        }
    }
    Ok(gates)
}

/// Full gate list `W⁽¹⁾, S(x), W⁽²⁾, …, S(x), W⁽ᴸ⁺¹⁾`.
pub fn build_model_circuit(spec: &ModelSpec, theta: &[f64], x: &[f64]) -> Result<Vec<Gate>> {
    spec.validate()?;
    spec.check_params(theta)?;
    let encoding = encoding_gates(spec, x)?;
    let per = spec.block_param_count();
    let mut gates = Vec::new();
    for (l, block) in theta.chunks(per).enumerate() {
        if l > 0 {
            gates.extend_from_slice(&encoding);
        }
        gates.extend(build_ansatz_block(spec.ansatz, spec.n, block)?);
    }
    Ok(gates)
}

/// Gate list of the ansatz blocks alone, with no encoding columns.
pub fn build_ansatz_circuit(spec: &ModelSpec, theta: &[f64]) -> Result<Vec<Gate>> {
    spec.validate()?;
    spec.check_params(theta)?;
    let per = spec.block_param_count();
    let mut gates = Vec::new();
    for block in theta.chunks(per) {
        gates.extend(build_ansatz_block(spec.ansatz, spec.n, block)?);
    }
    Ok(gates)
}

/// State prepared by the model circuit at input `x`.
pub fn model_state(spec: &ModelSpec, theta: &[f64], x: &[f64]) -> Result<StateVector> {
    let mut state = StateVector::zero(spec.n)?;
    state.apply_all(&build_model_circuit(spec, theta, x)?)?;
    Ok(state)
}

/// Model output `f(x, θ)`.
pub fn evaluate(spec: &ModelSpec, theta: &[f64], x: &[f64]) -> Result<f64> {
    Ok(model_state(spec, theta, x)?.expectation_mean_z())
}

/// A model with fixed parameters, compiled for repeated evaluation.
///
/// The first block does not depend on the input, so its output state is
/// computed once and reused for every point.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    spec: ModelSpec,
    prefix: StateVector,
    blocks: Vec<Vec<Gate>>,
}

impl CompiledModel {
    pub fn new(spec: &ModelSpec, theta: &[f64]) -> Result<Self> {
        spec.validate()?;
        spec.check_params(theta)?;
        let per = spec.block_param_count();
        let mut blocks = theta
            .chunks(per)
            .map(|b| build_ansatz_block(spec.ansatz, spec.n, b))
            .collect::<Result<Vec<_>>>()?;
        let first = blocks.remove(0);
        let mut prefix = StateVector::zero(spec.n)?;
        prefix.apply_all(&first)?;
        Ok(CompiledModel { spec: spec.clone(), prefix, blocks })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn state(&self, x: &[f64]) -> Result<StateVector> {
        let encoding = encoding_gates(&self.spec, x)?;
        let mut state = self.prefix.clone();
        for block in &self.blocks {
            state.apply_all(&encoding)?;
            state.apply_all(block)?;
        }
        Ok(state)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.state(x)?.expectation_mean_z())
    }

    /// Outputs at every point of `points`, in order.
    pub fn evaluate_many<P: AsRef<[f64]>>(&self, points: &[P]) -> Result<Vec<f64>> {
        points.iter().map(|p| self.evaluate(p.as_ref())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn idx(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn counts_match_reference_drawings() {
        assert_eq!(param_count(AnsatzKind::C15, 4, 1).unwrap(), 16);
        assert_eq!(param_count(AnsatzKind::Hea, 4, 1).unwrap(), 24);
        assert_eq!(param_count(AnsatzKind::C16, 4, 1).unwrap(), 22);
        assert!(param_count(AnsatzKind::C18, 1, 1).is_err());
        assert_eq!(param_count(AnsatzKind::Yzy, 1, 1).unwrap(), 6);
    }

    #[test]
    fn count_formula_matches_enumeration() {
        for kind in AnsatzKind::ALL {
            for n in 2..=8 {
                for layers in 1..=3 {
                    let spec = ModelSpec::new(n, layers, kind, vec![Axis::Y]).unwrap();
                    let theta = vec![0.3; spec.param_count()];
                    let gates = build_model_circuit(&spec, &theta, &[0.1]).unwrap();
                    let parameterized = gates.iter().filter(|g| g.angle().is_some()).count();
                    assert_eq!(parameterized - layers * n, spec.param_count(), "{kind} n={n}");
                }
            }
        }
    }

    #[test]
    fn yzy_two_qubits() {
        let g = build_ansatz_block(AnsatzKind::Yzy, 2, &idx(6)).unwrap();
        assert_eq!(
            g,
            vec![
                Gate::ry(0, 0.0),
                Gate::rz(0, 1.0),
                Gate::ry(0, 2.0),
                Gate::ry(1, 3.0),
                Gate::rz(1, 4.0),
                Gate::ry(1, 5.0),
            ]
        );
    }

    fn yzy_columns(n: usize) -> Vec<Gate> {
        (0..n)
            .flat_map(|q| {
                let b = 3.0 * q as f64;
                [Gate::ry(q, b), Gate::rz(q, b + 1.0), Gate::ry(q, b + 2.0)]
            })
            .collect()
    }

    fn xz_columns(n: usize) -> Vec<Gate> {
        (0..n)
            .flat_map(|q| {
                let b = 2.0 * q as f64;
                [Gate::rx(q, b), Gate::rz(q, b + 1.0)]
            })
            .collect()
    }

    #[test]
    fn four_qubit_blocks_match_drawings() {
        let mut want = yzy_columns(4);
        want.extend([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(c, t)| Gate::cnot(c, t)));
        assert_eq!(build_ansatz_block(AnsatzKind::YzyEntangling, 4, &idx(12)).unwrap(), want);

        let mut want = yzy_columns(4);
        want.extend([(0, 1), (2, 3), (1, 2), (3, 0)].map(|(c, t)| Gate::cnot(c, t)));
        assert_eq!(build_ansatz_block(AnsatzKind::Hea, 4, &idx(12)).unwrap(), want);

        let mut want: Vec<Gate> = (0..4).map(|q| Gate::ry(q, q as f64)).collect();
        want.extend([(3, 0), (2, 3), (1, 2), (0, 1)].map(|(c, t)| Gate::cnot(c, t)));
        want.extend((0..4).map(|q| Gate::ry(q, 4.0 + q as f64)));
        want.extend([(3, 2), (0, 3), (1, 0), (2, 1)].map(|(c, t)| Gate::cnot(c, t)));
        assert_eq!(build_ansatz_block(AnsatzKind::C15, 4, &idx(8)).unwrap(), want);

        let mut want = xz_columns(4);
        want.extend([Gate::crz(1, 0, 8.0), Gate::crz(3, 2, 9.0), Gate::crz(2, 1, 10.0)]);
        assert_eq!(build_ansatz_block(AnsatzKind::C16, 4, &idx(11)).unwrap(), want);

        let mut want = xz_columns(4);
        want.extend([Gate::crx(1, 0, 8.0), Gate::crx(3, 2, 9.0), Gate::crx(2, 1, 10.0)]);
        assert_eq!(build_ansatz_block(AnsatzKind::C17, 4, &idx(11)).unwrap(), want);

        let mut want = xz_columns(4);
        want.extend([
            Gate::crz(3, 0, 8.0),
            Gate::crz(2, 3, 9.0),
            Gate::crz(1, 2, 10.0),
            Gate::crz(0, 1, 11.0),
        ]);
        assert_eq!(build_ansatz_block(AnsatzKind::C18, 4, &idx(12)).unwrap(), want);

        let mut want = xz_columns(4);
        want.extend([
            Gate::crx(3, 0, 8.0),
            Gate::crx(2, 3, 9.0),
            Gate::crx(1, 2, 10.0),
            Gate::crx(0, 1, 11.0),
        ]);
        assert_eq!(build_ansatz_block(AnsatzKind::C19, 4, &idx(12)).unwrap(), want);
    }

    #[test]
    fn two_qubit_rings_emit_both_wrap_gates() {
        let g = build_ansatz_block(AnsatzKind::C18, 2, &idx(6)).unwrap();
        assert_eq!(&g[4..], &[Gate::crz(1, 0, 4.0), Gate::crz(0, 1, 5.0)]);
        let g = build_ansatz_block(AnsatzKind::Hea, 2, &idx(6)).unwrap();
        assert_eq!(&g[6..], &[Gate::cnot(0, 1), Gate::cnot(1, 0)]);
    }

    #[test]
    fn block_length_mismatch_is_an_error() {
        assert!(matches!(
            build_ansatz_block(AnsatzKind::C15, 4, &idx(7)),
            Err(Error::DimensionMismatch { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn block_times_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in AnsatzKind::ALL {
            for n in 2..=5 {
                let p: Vec<f64> =
                    (0..kind.block_param_count(n)).map(|_| rng.random::<f64>() * TAU).collect();
                let block = build_ansatz_block(kind, n, &p).unwrap();
                for basis in 0..(1 << n) {
                    let init = StateVector::basis(n, basis).unwrap();
                    let mut s = init.clone();
                    s.apply_all(&block).unwrap();
                    for g in block.iter().rev() {
                        s.apply(&g.inverse()).unwrap();
                    }
                    let err = s
                        .amplitudes()
                        .iter()
                        .zip(init.amplitudes())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    assert!(err < 1e-10);
                }
            }
        }
    }

    #[test]
    fn model_circuit_structure() {
        let spec = ModelSpec::new(3, 2, AnsatzKind::C15, vec![Axis::Y]).unwrap();
        let theta = vec![0.0; spec.param_count()];
        let gates = build_model_circuit(&spec, &theta, &[0.5]).unwrap();
        let block_len = build_ansatz_block(AnsatzKind::C15, 3, &[0.0; 6]).unwrap().len();
        assert_eq!(gates.len(), 3 * block_len + 2 * 3);
        let enc = &gates[block_len..block_len + 3];
        assert!(enc.iter().enumerate().all(|(q, g)| *g == Gate::ry(q, 0.5)));

        let spec2 = ModelSpec::new(2, 1, AnsatzKind::Yzy, vec![Axis::X, Axis::Y]).unwrap();
        let gates = build_model_circuit(&spec2, &[0.0; 12], &[0.1, 0.2]).unwrap();
        assert_eq!(
            &gates[6..10],
            &[Gate::rx(0, 0.1), Gate::rx(1, 0.1), Gate::ry(0, 0.2), Gate::ry(1, 0.2)]
        );
        assert!(matches!(
            build_model_circuit(&spec2, &[0.0; 12], &[0.1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_qubit_identity_model_is_cosine() {
        let spec = ModelSpec::new(1, 1, AnsatzKind::Yzy, vec![Axis::Y]).unwrap();
        for k in 0..20 {
            let x = k as f64 * 0.37;
            assert_abs_diff_eq!(evaluate(&spec, &[0.0; 6], &[x]).unwrap(), x.cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn outputs_bounded_periodic_and_4pi_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for kind in AnsatzKind::ALL {
            let spec = ModelSpec::new(3, 1, kind, vec![Axis::Y]).unwrap();
            for _ in 0..125 {
                let theta = spec.random_params(&mut rng);
                let x = rng.random::<f64>() * TAU;
                let f = evaluate(&spec, &theta, &[x]).unwrap();
                assert!(f.abs() <= 1.0);
                assert_abs_diff_eq!(evaluate(&spec, &theta, &[x + TAU]).unwrap(), f, epsilon = 1e-10);
                let k = rng.random_range(0..theta.len());
                let mut shifted = theta.clone();
                shifted[k] += 2.0 * TAU;
                assert_abs_diff_eq!(evaluate(&spec, &shifted, &[x]).unwrap(), f, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn compiled_model_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in AnsatzKind::ALL {
            let spec = ModelSpec::new(3, 2, kind, vec![Axis::X, Axis::Y]).unwrap();
            let theta = spec.random_params(&mut rng);
            let compiled = CompiledModel::new(&spec, &theta).unwrap();
            let x = [0.3, PI / 3.0];
            assert_abs_diff_eq!(
                compiled.evaluate(&x).unwrap(),
                evaluate(&spec, &theta, &x).unwrap(),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ModelSpec::new(4, 2, AnsatzKind::YzyEntangling, vec![Axis::X, Axis::Y]).unwrap();
        let json = spec.to_json().unwrap();
        assert!(json.contains("\"YZY_ENTANGLING\""));
        assert!(json.contains("\"layers\": 2"));
        assert_eq!(ModelSpec::from_json(&json).unwrap(), spec);
        let bad = r#"{"n":1,"layers":1,"ansatz":"C15","axes":["Y"]}"#;
        assert!(ModelSpec::from_json(bad).is_err());
    }

    #[test]
    fn ansatz_names_parse() {
        for kind in AnsatzKind::ALL {
            assert_eq!(kind.name().parse::<AnsatzKind>().unwrap(), kind);
        }
        assert_eq!("circuit_15".parse::<AnsatzKind>().unwrap(), AnsatzKind::C15);
        assert_eq!("yzy-entangling".parse::<AnsatzKind>().unwrap(), AnsatzKind::YzyEntangling);
        assert!("C20".parse::<AnsatzKind>().is_err());
    }
}
