//! Benchmark fixtures.

use qfm_core::{AnsatzKind, Axis, ModelSpec};

/// One-dimensional single-layer model, the shape the metric comparisons use.
pub fn spec(ansatz: AnsatzKind, n: usize) -> ModelSpec {
    ModelSpec::new(n, 1, ansatz, vec![Axis::Y]).expect("valid benchmark spec")
}

/// Qubit counts swept by the scaling groups.
pub const QUBITS: [usize; 4] = [2, 4, 6, 8];
