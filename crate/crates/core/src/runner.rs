//! Disorder-averaged experiment drivers shared by the CLI and the
//! acceptance suite.
//!
//! Every realization derives its RNG stream from `(master_seed, experiment
//! salt, realization index)`, so results are independent of worker count and
//! scheduling order.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytics::{aggregate, AveragedSeries};
use crate::ensembles::{sample_haar_unitary, CMatrix};
use crate::error::{Error, Result};
use crate::gaussian::{run_gaussian_complexity, sample_floquet, BlockEnsemble, GaussianMode};
use crate::krylov::{
    run_state_complexity, run_state_complexity_tracked, run_trajectory_complexity,
    ComplexitySeries, MAX_OPERATOR_QUBITS, MAX_STATE_QUBITS,
};
use crate::rng::stream;
use crate::state::{
    brickwork_step, monitored_step_with, Boundary, BrickworkLayer, MeasurementSchedule, Parity,
    QuantumState,
};

// stream-domain salts, one per experiment family
const SALT_GLOBAL_HAAR: u64 = 0x47_4c_4f_42;
const SALT_RUC: u64 = 0x52_55_43;
const SALT_MONITORED: u64 = 0x4d_4f_4e;
const SALT_GAUSSIAN: u64 = 0x47_41_55;
const SALT_OPERATOR: u64 = 0x4f_50_52;

fn check_state_cap(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_STATE_QUBITS {
        return Err(Error::ResourceCap(format!(
            "state runs are capped at N = {MAX_STATE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    Ok(())
}

/// Replace `v` with a fresh Haar-random unit vector.
///
/// Applying an independent Haar unitary to any unit vector yields a
/// uniformly distributed unit vector, so the image is sampled directly as a
/// normalized complex Gaussian vector instead of forming the D x D matrix.
pub fn haar_state_step<R: Rng>(v: &mut Vec<Complex64>, rng: &mut R) {
    let dim = v.len();
    let mut norm_sq = 0.0;
    for x in v.iter_mut() {
        *x = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        norm_sq += x.norm_sqr();
    }
    let inv = 1.0 / norm_sq.sqrt();
    for x in v.iter_mut() {
        *x *= inv;
    }
    debug_assert!(dim == v.len());
}

/// Per-step global Haar evolution of a D-dimensional state.
///
/// With `exact_unitary` a full Haar matrix is sampled and applied each step
/// (O(D³)); otherwise the distributionally identical direct state sampling
/// is used.
pub fn run_global_haar(
    dim: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
    exact_unitary: bool,
) -> Result<AveragedSeries> {
    let series = global_haar_realizations(dim, steps, samples, master_seed, exact_unitary)?;
    aggregate(&series)
}

pub fn global_haar_realizations(
    dim: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
    exact_unitary: bool,
) -> Result<Vec<ComplexitySeries>> {
    if dim == 0 || steps == 0 || samples == 0 {
        return Err(Error::InvalidParameter("need dim, steps, samples >= 1".into()));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(master_seed, &[SALT_GLOBAL_HAAR, i]);
            let mut v0 = vec![Complex64::new(0.0, 0.0); dim];
            v0[0] = Complex64::new(1.0, 0.0);
            let (series, _) = run_trajectory_complexity(v0, steps, |v, _t| {
                if exact_unitary {
                    let u = sample_haar_unitary(dim, &mut rng)?;
                    let mut next = vec![Complex64::new(0.0, 0.0); dim];
                    for (j, x) in v.iter().enumerate() {
                        for i in 0..dim {
                            next[i] += u[(i, j)] * x;
                        }
                    }
                    // guard against norm drift over long products
                    let inv = 1.0 / next.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                    for x in &mut next {
                        *x *= inv;
                    }
                    *v = next;
                } else {
                    haar_state_step(v, &mut rng);
                }
                Ok(())
            })?;
            Ok(series)
        })
        .collect()
}

fn sample_brickwork_layers<R: Rng>(
    n_qubits: usize,
    boundary: Boundary,
    rng: &mut R,
) -> Result<(BrickworkLayer, BrickworkLayer)> {
    let even = BrickworkLayer::sample(n_qubits, Parity::Even, boundary, rng, |r| {
        sample_haar_unitary(4, r)
    })?;
    let odd = BrickworkLayer::sample(n_qubits, Parity::Odd, boundary, rng, |r| {
        sample_haar_unitary(4, r)
    })?;
    Ok((even, odd))
}

/// Brickwork random unitary circuit: fresh local Haar gates at every step.
pub fn run_ruc(
    n_qubits: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
    boundary: Boundary,
) -> Result<AveragedSeries> {
    aggregate(&ruc_realizations(n_qubits, steps, samples, master_seed, boundary)?)
}

pub fn ruc_realizations(
    n_qubits: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
    boundary: Boundary,
) -> Result<Vec<ComplexitySeries>> {
    check_state_cap(n_qubits)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(master_seed, &[SALT_RUC, i]);
            let psi0 = QuantumState::alternating(n_qubits)?;
            let (series, _) = run_state_complexity(&psi0, steps, |state, _t| {
                let (even, odd) = sample_brickwork_layers(n_qubits, boundary, &mut rng)?;
                brickwork_step(state, &odd, &even)
            })?;
            Ok(series)
        })
        .collect()
}

/// One realization of a monitored run.
#[derive(Debug, Clone)]
pub struct MonitoredRealization {
    pub series: ComplexitySeries,
    pub measurement_count: usize,
    /// Basis index of the post-step state whenever the step left the state
    /// within 1e-10 of a computational basis state (always the case at p=1).
    pub basis_trace: Vec<Option<usize>>,
    /// Krylov basis dimension after each step (`dims[0] = 1`); the first t
    /// where it stops growing is the basis-acquisition time.
    pub basis_dims: Vec<usize>,
}

impl MonitoredRealization {
    /// First t at which the Krylov basis reached its final dimension.
    pub fn basis_acquisition_time(&self) -> usize {
        let final_dim = *self.basis_dims.last().unwrap_or(&1);
        self.basis_dims.iter().position(|&d| d == final_dim).unwrap_or(0)
    }
}

/// Brickwork circuit punctured by Bernoulli(p) projective measurements.
pub fn monitored_realizations(
    n_qubits: usize,
    steps: usize,
    p: f64,
    samples: usize,
    master_seed: u64,
    boundary: Boundary,
    schedule: MeasurementSchedule,
) -> Result<Vec<MonitoredRealization>> {
    check_state_cap(n_qubits)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "measurement rate must lie in [0,1], got {p}"
        )));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            // p = 0 must reproduce the unmonitored circuit bit-for-bit, so
            // the gate stream is shared with run_ruc and the measurement
            // stream kept separate.
            let mut gate_rng = stream(master_seed, &[SALT_RUC, i]);
            let mut meas_rng = stream(master_seed, &[SALT_MONITORED, i]);
            let psi0 = QuantumState::alternating(n_qubits)?;
            let mut measurement_count = 0usize;
            let mut basis_trace = Vec::with_capacity(steps);
            let (series, basis_dims, _) = run_state_complexity_tracked(&psi0, steps, |state, _t| {
                let (even, odd) = sample_brickwork_layers(n_qubits, boundary, &mut gate_rng)?;
                let records = if p == 0.0 {
                    brickwork_step(state, &odd, &even)?;
                    Vec::new()
                } else {
                    monitored_step_with(state, &odd, &even, p, schedule, &mut meas_rng)?
                };
                measurement_count += records.len();
                basis_trace.push(basis_index(state));
                Ok(())
            })?;
            Ok(MonitoredRealization { series, measurement_count, basis_trace, basis_dims })
        })
        .collect()
}

pub fn run_monitored(
    n_qubits: usize,
    steps: usize,
    p: f64,
    samples: usize,
    master_seed: u64,
    boundary: Boundary,
    schedule: MeasurementSchedule,
) -> Result<AveragedSeries> {
    let realizations =
        monitored_realizations(n_qubits, steps, p, samples, master_seed, boundary, schedule)?;
    let series: Vec<ComplexitySeries> = realizations.into_iter().map(|r| r.series).collect();
    aggregate(&series)
}

/// Basis index when the state is (numerically) a computational basis state.
pub fn basis_index(state: &QuantumState) -> Option<usize> {
    let mut found = None;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() > 0.5 {
            found = Some(i);
        } else if a.norm_sqr() > 1e-20 {
            return None;
        }
    }
    found.filter(|&i| (state.amplitudes()[i].norm() - 1.0).abs() < 1e-10)
}

/// Disorder-averaged Gaussian Floquet complexity.
pub fn run_gaussian(
    n_pairs: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
    homogeneous: bool,
    ensemble: BlockEnsemble,
    mode: GaussianMode,
) -> Result<AveragedSeries> {
    aggregate(&gaussian_realizations(
        n_pairs, steps, samples, master_seed, homogeneous, ensemble, mode,
    )?)
}

pub fn gaussian_realizations(
    n_pairs: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
    homogeneous: bool,
    ensemble: BlockEnsemble,
    mode: GaussianMode,
) -> Result<Vec<ComplexitySeries>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(master_seed, &[SALT_GAUSSIAN, i]);
            let floquet = sample_floquet(n_pairs, homogeneous, ensemble, &mut rng)?;
            let (series, _) = run_gaussian_complexity(&floquet, None, steps, mode)?;
            Ok(series)
        })
        .collect()
}

/// Operator K-complexity under per-step global Haar conjugation
/// `O -> U†OU`, starting from the Hilbert-Schmidt-normalized Z on qubit 0.
pub fn run_operator_haar(
    n_qubits: usize,
    steps: usize,
    samples: usize,
    master_seed: u64,
) -> Result<AveragedSeries> {
    if n_qubits > MAX_OPERATOR_QUBITS {
        return Err(Error::ResourceCap(format!(
            "operator runs are capped at N = {MAX_OPERATOR_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let series: Result<Vec<ComplexitySeries>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(master_seed, &[SALT_OPERATOR, i]);
            let o0 = z_on_qubit(n_qubits, 0);
            let (series, _) = crate::krylov::run_operator_complexity(&o0, steps, |op, _t| {
                let u = sample_haar_unitary(dim, &mut rng)?;
                *op = u.adjoint() * op.clone() * u;
                Ok(())
            })?;
            Ok(series)
        })
        .collect();
    aggregate(&series?)
}

/// Pauli Z on one qubit as a dense D x D matrix (unit Hilbert-Schmidt norm).
pub fn z_on_qubit(n_qubits: usize, site: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    let mask = 1usize << site;
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(if i & mask == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
