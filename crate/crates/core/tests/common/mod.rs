#![allow(dead_code)]
//! Shared dense-matrix oracles for the integration tests. Everything here is
//! deliberately naive (full 2^N x 2^N algebra) so it exercises none of the
//! bit-stride code under test.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use krylov_circuits::ensembles::CMatrix;
use krylov_circuits::state::QuantumState;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Embed a 4x4 gate acting on qubits (qa, qb) into the full 2^n matrix,
/// with qa the high bit of the gate index.
pub fn dense_gate_matrix(n: usize, gate: &CMatrix, qa: usize, qb: usize) -> CMatrix {
    let dim = 1usize << n;
    let ma = 1usize << qa;
    let mb = 1usize << qb;
    let mut full = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let gcol = 2 * ((col & ma) != 0) as usize + ((col & mb) != 0) as usize;
        let rest = col & !(ma | mb);
        for grow in 0..4 {
            let row = rest | if grow & 2 != 0 { ma } else { 0 } | if grow & 1 != 0 { mb } else { 0 };
            full[(row, col)] = gate[(grow, gcol)];
        }
    }
    full
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> QuantumState {
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::from_amplitudes(n, amps).unwrap()
}

pub fn apply_dense(matrix: &CMatrix, amps: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(amps);
    (matrix * v).iter().copied().collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Operator-Schmidt coefficients of a 4x4 gate: singular values of the
/// reshuffled matrix R[(a,c),(b,d)] = G[(a,b),(c,d)], scaled so the squares
/// sum to 4 for a unitary.
pub fn operator_schmidt_coeffs(gate: &CMatrix) -> Vec<f64> {
    let mut r = CMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    r[(a * 2 + cc, b * 2 + d)] = gate[(a * 2 + b, cc * 2 + d)];
                }
            }
        }
    }
    r.svd(false, false).singular_values.iter().copied().collect()
}
