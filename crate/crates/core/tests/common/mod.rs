//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use qfm_core::circuit::build_model_circuit;
use qfm_core::{Axis, Gate, ModelSpec};

type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

fn pauli(axis: Axis) -> Matrix {
    match axis {
        Axis::X => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        Axis::Y => vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]],
        Axis::Z => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
    }
}

/// `cos(θ/2)·I − i·sin(θ/2)·P`.
fn rotation(axis: Axis, angle: f64) -> Matrix {
    let p = pauli(axis);
    let (s, co) = (angle / 2.0).sin_cos();
    (0..2)
        .map(|i| {
            (0..2)
                .map(|j| {
                    let id = if i == j { co } else { 0.0 };
                    c(id, 0.0) + c(0.0, -s) * p[i][j]
                })
                .collect()
        })
        .collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Tensor product with `ops[q]` on qubit `q`; qubit 0 is the leftmost factor.
fn embed(n: usize, ops: &[(usize, Matrix)]) -> Matrix {
    let mut out = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        let m = ops.iter().find(|(t, _)| *t == q).map(|(_, m)| m.clone()).unwrap_or_else(|| identity(2));
        out = kron(&out, &m);
    }
    out
}

fn projector(bit: usize) -> Matrix {
    let mut p = vec![vec![c(0.0, 0.0); 2]; 2];
    p[bit][bit] = c(1.0, 0.0);
    p
}

fn controlled(n: usize, control: usize, target: usize, u: Matrix) -> Matrix {
    add(
        &embed(n, &[(control, projector(0))]),
        &embed(n, &[(control, projector(1)), (target, u)]),
    )
}

pub fn gate_matrix(n: usize, g: &Gate) -> Matrix {
    match *g {
        Gate::Rot { axis, target, angle } => embed(n, &[(target, rotation(axis, angle))]),
        Gate::CRot { axis, control, target, angle } => controlled(n, control, target, rotation(axis, angle)),
        Gate::Cnot { control, target } => controlled(n, control, target, pauli(Axis::X)),
    }
}

/// Full circuit unitary as a product of dense gate matrices.
pub fn circuit_unitary(n: usize, gates: &[Gate]) -> Matrix {
    gates.iter().fold(identity(1 << n), |u, g| matmul(&gate_matrix(n, g), &u))
}

/// `⟨ψ| (1/n) Σ_q Z_q |ψ⟩` as a complex number, `ψ = U|0⟩`.
pub fn oracle_output(spec: &ModelSpec, theta: &[f64], x: &[f64]) -> Complex64 {
    let n = spec.n;
    let u = circuit_unitary(n, &build_model_circuit(spec, theta, x).unwrap());
    let psi: Vec<Complex64> = u.iter().map(|row| row[0]).collect();
    let mut obs = vec![vec![c(0.0, 0.0); 1 << n]; 1 << n];
    for q in 0..n {
        let z = embed(n, &[(q, pauli(Axis::Z))]);
        obs = add(&obs, &z);
    }
    let mut acc = c(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * obs[i][j] * psi[j];
        }
    }
    acc / n as f64
}

/// One-dimensional DFT by direct summation, `c_ω = K⁻¹ Σ_j f_j e^{−iω2πj/K}`,
/// for `ω ∈ [−band, band]`.
pub fn naive_dft_1d(values: &[Complex64], band: i64) -> Vec<Complex64> {
    let k = values.len() as f64;
    (-band..=band)
        .map(|w| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -(w as f64) * std::f64::consts::TAU * j as f64 / k))
                .sum::<Complex64>()
                / k
        })
        .collect()
}

/// Counts eigenvalue pairs `(λ_j, λ_k)` of `Σ_q Z_q / 2` over `nL` encoding
/// rotations whose difference is `ω`.
pub fn brute_force_degeneracy(nl: usize, omega: i64) -> u64 {
    let eig: Vec<i64> = (0..1u64 << nl).map(|b| 2 * b.count_ones() as i64 - nl as i64).collect();
    let mut count = 0;
    for a in &eig {
        for b in &eig {
            // Eigenvalues are (#plus − #minus)/2, so differences are (a − b)/2.
            if a - b == 2 * omega {
                count += 1;
            }
        }
    }
    count
}

/// Binomial coefficient via the multiplicative formula in floating point.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Kolmogorov–Smirnov distance of `values` to `U[lo, hi)`.
pub fn ks_uniform(values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| (x - lo) / (hi - lo)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs())
        })
        .fold(0.0, f64::max)
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
