//! Dense statevector simulation.
//!
//! Conventions: `R_P(θ) = exp(-i θ P / 2)` for `P ∈ {X, Y, Z}`, controlled
//! rotations act on the target only when the control bit is 1, and qubit 0 is
//! the most significant bit of the basis-state label (top wire of a circuit
//! diagram).

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Role};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 16;

/// Pauli rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" | "RX" => Ok(Axis::X),
            "Y" | "RY" => Ok(Axis::Y),
            "Z" | "RZ" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown Pauli axis `{other}`"))),
        }
    }
}

/// A single gate of the supported gate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Single-qubit Pauli rotation.
    Rot { axis: Axis, target: usize, angle: f64 },
    /// Controlled Pauli rotation (the circuit zoo only uses X and Z).
    CRot {
        axis: Axis,
        control: usize,
        target: usize,
        angle: f64,
    },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rx(target: usize, angle: f64) -> Self {
        Gate::Rot { axis: Axis::X, target, angle }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate::Rot { axis: Axis::Y, target, angle }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate::Rot { axis: Axis::Z, target, angle }
    }

    pub fn crx(control: usize, target: usize, angle: f64) -> Self {
        Gate::CRot { axis: Axis::X, control, target, angle }
    }

    pub fn crz(control: usize, target: usize, angle: f64) -> Self {
        Gate::CRot { axis: Axis::Z, control, target, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Rot { target, .. } | Gate::CRot { target, .. } | Gate::Cnot { target, .. } => {
                target
            }
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Rot { .. } => None,
            Gate::CRot { control, .. } | Gate::Cnot { control, .. } => Some(control),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rot { angle, .. } | Gate::CRot { angle, .. } => Some(angle),
            Gate::Cnot { .. } => None,
        }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Self {
        match *self {
            Gate::Rot { axis, target, angle } => Gate::Rot { axis, target, angle: -angle },
            Gate::CRot { axis, control, target, angle } => Gate::CRot {
                axis,
                control,
                target,
                angle: -angle,
            },
            g @ Gate::Cnot { .. } => g,
        }
    }

    /// Checks qubit indices against a register of `n` qubits.
    pub fn validate(&self, n: usize) -> Result<()> {
        let t = self.target();
        if t >= n {
            return Err(Error::InvalidGate(format!("target {t} out of range for {n} qubits")));
        }
        if let Some(c) = self.control() {
            if c >= n {
                return Err(Error::InvalidGate(format!("control {c} out of range for {n} qubits")));
            }
            if c == t {
                return Err(Error::InvalidGate(format!("control and target both {c}")));
            }
        }
        Ok(())
    }
}

/// 2×2 matrix of `exp(-i θ P / 2)` in row-major order.
pub fn rotation_matrix(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let zero = Complex64::new(0.0, 0.0);
    match axis {
        Axis::X => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        Axis::Y => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        Axis::Z => [[Complex64::new(c, -s), zero], [zero, Complex64::new(c, s)]],
    }
}

/// Complex amplitudes of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Computational basis state with label `index` (qubit 0 is the MSB).
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n}"
            )));
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amplitudes })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numeric("cannot normalize a zero or non-finite vector".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { n, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn stride(&self, qubit: usize) -> usize {
        1 << (self.n - 1 - qubit)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            Gate::Rot { axis, target, angle } => {
                let m = rotation_matrix(axis, angle);
                self.apply_single(target, &m, None);
            }
            Gate::CRot { axis, control, target, angle } => {
                let m = rotation_matrix(axis, angle);
                self.apply_single(target, &m, Some(control));
            }
            Gate::Cnot { control, target } => {
                let ts = self.stride(target);
                let cs = self.stride(control);
                for i in 0..self.amplitudes.len() {
                    if i & ts == 0 && i & cs != 0 {
                        self.amplitudes.swap(i, i | ts);
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies every gate of `gates` in order.
    pub fn apply_all<'a, I>(&mut self, gates: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a Gate>,
    {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Consuming variant of [`StateVector::apply`].
    pub fn applied(mut self, gate: &Gate) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    fn apply_single(&mut self, target: usize, m: &[[Complex64; 2]; 2], control: Option<usize>) {
        let ts = self.stride(target);
        let cmask = control.map(|c| self.stride(c)).unwrap_or(0);
        let dim = self.amplitudes.len();
        // Visit each (|…0…⟩, |…1…⟩) pair on the target once, in contiguous blocks.
        let mut base = 0;
        while base < dim {
            for i in base..base + ts {
                if i & cmask != cmask {
                    continue;
                }
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + ts];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i + ts] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * ts;
        }
    }

    /// Probability of each computational basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨Z_i⟩` for every qubit.
    pub fn z_expectations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, o) in out.iter_mut().enumerate() {
                if i & self.stride(q) == 0 {
                    *o += p;
                } else {
                    *o -= p;
                }
            }
        }
        out
    }

    /// `⟨M⟩` with `M = (1/n) Σ_i Z_i`.
    pub fn expectation_mean_z(&self) -> f64 {
        let n = self.n as f64;
        let mut acc = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            acc += a.norm_sqr() * magnetization(i, self.n);
        }
        (acc / n).clamp(-1.0, 1.0)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Shot-sampled estimate of the mean-Z expectation value.
    ///
    /// Each shot draws a full bitstring from `|ψ|²` by inverse CDF.
    pub fn sample_mean_z(&self, shots: usize, rng_seed: u64) -> Result<f64> {
        let mut rng = seed::stream(rng_seed, Role::Shots, 0);
        self.sample_mean_z_with(shots, &mut rng)
    }

    /// Like [`StateVector::sample_mean_z`] but drawing from a caller-owned
    /// generator.
    pub fn sample_mean_z_with<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<f64> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0;
        for a in &self.amplitudes {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let last_nonzero = self
            .amplitudes
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .unwrap_or(0);
        let mut sum = 0.0;
        for _ in 0..shots {
            let u = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
            sum += magnetization(idx, self.n);
        }
        Ok(sum / (shots as f64 * self.n as f64))
    }
}

/// `Σ_q (1 − 2 b_q)` for basis label `index`.
#[inline]
fn magnetization(index: usize, n: usize) -> f64 {
    n as f64 - 2.0 * (index.count_ones() as f64)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ry_pi_flips_zero() {
        let s = StateVector::zero(1).unwrap().applied(&Gate::ry(0, PI)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cnot_on_10_gives_11() {
        // |10⟩: qubit 0 (MSB) set.
        let s = StateVector::basis(2, 0b10).unwrap().applied(&Gate::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[0b11], c(1.0, 0.0));
        let s = StateVector::basis(2, 0b01).unwrap().applied(&Gate::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[0b01], c(1.0, 0.0));
    }

    #[test]
    fn rz_is_a_phase_on_zero() {
        let theta = 0.73;
        let s = StateVector::zero(1).unwrap().applied(&Gate::rz(0, theta)).unwrap();
        let want = Complex64::from_polar(1.0, -theta / 2.0);
        assert_abs_diff_eq!((s.amplitudes()[0] - want).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(s.amplitudes()[1], c(0.0, 0.0));
    }

    #[test]
    fn controlled_rotation_needs_control_set() {
        let off = StateVector::basis(2, 0b00).unwrap().applied(&Gate::crx(0, 1, PI)).unwrap();
        assert_eq!(off.amplitudes()[0], c(1.0, 0.0));
        let on = StateVector::basis(2, 0b10).unwrap().applied(&Gate::crx(0, 1, PI)).unwrap();
        // RX(π)|0⟩ = -i|1⟩
        assert_abs_diff_eq!((on.amplitudes()[0b11] - c(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_indices_rejected() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(s.apply(&Gate::rx(2, 0.1)), Err(Error::InvalidGate(_))));
        assert!(matches!(s.apply(&Gate::cnot(1, 1)), Err(Error::InvalidGate(_))));
        assert!(matches!(s.apply(&Gate::crz(5, 0, 0.1)), Err(Error::InvalidGate(_))));
    }

    #[test]
    fn mean_z_examples() {
        assert_eq!(StateVector::zero(3).unwrap().expectation_mean_z(), 1.0);
        assert_eq!(StateVector::basis(3, 0b111).unwrap().expectation_mean_z(), -1.0);
        let plus = StateVector::zero(1).unwrap().applied(&Gate::ry(0, FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!(plus.expectation_mean_z(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let half = zero.clone().applied(&Gate::ry(0, FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!(fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&zero, &half).unwrap(), 0.5, epsilon = 1e-15);
        let two = StateVector::zero(2).unwrap();
        assert!(matches!(fidelity(&zero, &two), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sampling_deterministic_state_is_exact() {
        let s = StateVector::zero(4).unwrap();
        assert_eq!(s.sample_mean_z(17, 3).unwrap(), 1.0);
        assert!(s.sample_mean_z(0, 3).is_err());
    }

    #[test]
    fn plus_state_sampling_within_binomial_error() {
        // Standard error 1/√S = 1e-3; 3e-3 is a 3σ bound.
        let plus = StateVector::zero(1).unwrap().applied(&Gate::ry(0, FRAC_PI_2)).unwrap();
        let est = plus.sample_mean_z(1_000_000, 11).unwrap();
        assert!(est.abs() < 3e-3, "estimate {est}");
    }

    #[test]
    fn sampling_rms_halves_when_shots_quadruple() {
        let s = StateVector::zero(2)
            .unwrap()
            .applied(&Gate::ry(0, 1.1))
            .unwrap()
            .applied(&Gate::ry(1, 2.3))
            .unwrap();
        let exact = s.expectation_mean_z();
        let rms = |shots: usize| {
            let trials = 400;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(shots as u64);
            let ss: f64 = (0..trials)
                .map(|_| (s.sample_mean_z_with(shots, &mut rng).unwrap() - exact).powi(2))
                .sum();
            (ss / trials as f64).sqrt()
        };
        let ratio = rms(4096) / rms(1024);
        assert!((0.4..0.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn sampled_mean_within_five_standard_errors() {
        let s = StateVector::zero(3)
            .unwrap()
            .applied(&Gate::ry(0, 0.9))
            .unwrap()
            .applied(&Gate::rx(1, 2.0))
            .unwrap()
            .applied(&Gate::cnot(1, 2))
            .unwrap();
        let exact = s.expectation_mean_z();
        let trials = 10_000;
        let shots = 256;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let xs: Vec<f64> =
            (0..trials).map(|_| s.sample_mean_z_with(shots, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / trials as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - exact).abs() < 5.0 * se, "mean {mean} exact {exact} se {se}");
    }

    #[test]
    fn norm_preserved_over_many_random_sequences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=6usize);
            let mut s = StateVector::zero(n).unwrap();
            for _ in 0..rng.random_range(1..30) {
                let t = rng.random_range(0..n);
                let a = rng.random_range(-10.0..10.0);
                let g = match (n, rng.random_range(0..6)) {
                    (1, k) | (_, k @ 0..=2) => {
                        let axis = [Axis::X, Axis::Y, Axis::Z][k % 3];
                        Gate::Rot { axis, target: t, angle: a }
                    }
                    (_, k) => {
                        let c = (t + rng.random_range(1..n)) % n;
                        match k {
                            3 => Gate::cnot(c, t),
                            4 => Gate::crx(c, t, a),
                            _ => Gate::crz(c, t, a),
                        }
                    }
                };
                s.apply(&g).unwrap();
            }
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        let angle = -10.0f64..10.0;
        let pair = (0..n, 1..n).prop_map(move |(c, off)| (c, (c + off) % n));
        prop_oneof![
            (0..n, angle.clone()).prop_map(|(t, a)| Gate::rx(t, a)),
            (0..n, angle.clone()).prop_map(|(t, a)| Gate::ry(t, a)),
            (0..n, angle.clone()).prop_map(|(t, a)| Gate::rz(t, a)),
            pair.clone().prop_map(|(c, t)| Gate::cnot(c, t)),
            (pair.clone(), angle.clone()).prop_map(|((c, t), a)| Gate::crx(c, t, a)),
            (pair, angle).prop_map(|((c, t), a)| Gate::crz(c, t, a)),
        ]
    }

    fn arb_circuit() -> impl Strategy<Value = (usize, Vec<Gate>)> {
        (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(arb_gate(n), 0..40)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn norm_is_preserved((n, gates) in arb_circuit()) {
            let mut s = StateVector::zero(n).unwrap();
            for g in &gates {
                s.apply(g).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn inverse_round_trip((n, gates) in arb_circuit(), start in 0usize..64) {
            let init = StateVector::basis(n, start % (1 << n)).unwrap()
                .applied(&Gate::ry(0, 0.4)).unwrap()
                .applied(&Gate::rz(n - 1, 1.3)).unwrap();
            let mut s = init.clone();
            s.apply_all(&gates).unwrap();
            for g in gates.iter().rev() {
                s.apply(&g.inverse()).unwrap();
            }
            let diff: f64 = s.amplitudes().iter().zip(init.amplitudes())
                .map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-10);
        }

        #[test]
        fn fidelity_symmetric_and_phase_invariant(
            (n, gates) in arb_circuit(),
            (_, other) in arb_circuit(),
            phase in 0.0f64..6.3,
        ) {
            let mut a = StateVector::zero(n).unwrap();
            a.apply_all(&gates).unwrap();
            let mut b = StateVector::zero(n).unwrap();
            for g in other.iter().filter(|g| g.validate(n).is_ok()) {
                b.apply(g).unwrap();
            }
            let f = fidelity(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
            let rotated = StateVector::from_amplitudes(
                a.amplitudes().iter().map(|x| x * Complex64::from_polar(1.0, phase)).collect(),
            ).unwrap();
            prop_assert!((fidelity(&rotated, &b).unwrap() - f).abs() < 1e-12);
        }

        #[test]
        fn mean_z_is_bounded((n, gates) in arb_circuit()) {
            let mut s = StateVector::zero(n).unwrap();
            s.apply_all(&gates).unwrap();
            let e = s.expectation_mean_z();
            prop_assert!((-1.0..=1.0).contains(&e));
            let per_qubit = s.z_expectations().iter().sum::<f64>() / n as f64;
            prop_assert!((e - per_qubit).abs() < 1e-12);
        }
    }
}
