//! Krylov basis construction from a discrete-time trajectory and the spread
//! complexity / operator K-complexity built on it.
//!
//! The basis starts as `K_0 = psi(0)` and each later trajectory state is
//! orthogonalized against all existing basis vectors (modified Gram-Schmidt
//! with one full re-orthogonalization pass). A state whose residual falls
//! below the dependence tolerance adds no basis vector.

use num_complex::Complex64;

use crate::ensembles::CMatrix;
use crate::error::{Error, Result};
use crate::state::QuantumState;

/// Default relative residual below which a trajectory state is treated as
/// linearly dependent on the existing basis.
pub const DEFAULT_DEPENDENCE_TOL: f64 = 1e-8;

/// Hard cap on the ambient dimension of the dense basis. The experiment
/// drivers enforce the tighter practical limits (N <= 12 qubits for states,
/// N <= 5 for vectorized operators).
pub const MAX_AMBIENT_DIM: usize = 65536;

/// Largest many-body state run: N qubits with D = 2^N dense basis vectors.
pub const MAX_STATE_QUBITS: usize = 12;

/// Largest operator run: ambient dimension is D² = 4^N.
pub const MAX_OPERATOR_QUBITS: usize = 5;

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        let p = x.conj() * y;
        re += p.re;
        im += p.im;
    }
    Complex64::new(re, im)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Coefficients of one trajectory state over the Krylov basis.
#[derive(Debug, Clone)]
pub struct CoefficientRecord {
    pub time_step: usize,
    /// phi_n = <K_n|psi(t)>; if this step grew the basis, the last entry is
    /// the residual norm (the coefficient on the freshly added vector).
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    pub extended_basis: bool,
}

/// Ordered orthonormal basis grown incrementally from a trajectory.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<Complex64>>,
    tolerance: f64,
}

impl KrylovBasis {
    /// Start a basis with `K_0 = psi0`.
    pub fn new(psi0: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        let ambient_dim = psi0.len();
        if ambient_dim == 0 {
            return Err(Error::InvalidDimension("ambient dimension must be >= 1".into()));
        }
        if ambient_dim > MAX_AMBIENT_DIM {
            return Err(Error::ResourceCap(format!(
                "ambient dimension {ambient_dim} exceeds the dense-basis cap {MAX_AMBIENT_DIM}"
            )));
        }
        if (norm(&psi0) - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization(format!(
                "initial vector norm {} is not 1",
                norm(&psi0)
            )));
        }
        Ok(Self {
            ambient_dim,
            vectors: vec![psi0],
            tolerance,
        })
    }

    pub fn with_default_tol(psi0: Vec<Complex64>) -> Result<Self> {
        Self::new(psi0, DEFAULT_DEPENDENCE_TOL)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// Project `psi` on the basis and extend the basis with the normalized
    /// residual when it is independent.
    pub fn extend_and_project(&mut self, psi: &[Complex64], time_step: usize) -> Result<CoefficientRecord> {
        if psi.len() != self.ambient_dim {
            return Err(Error::InvalidDimension(format!(
                "vector length {} does not match ambient dimension {}",
                psi.len(),
                self.ambient_dim
            )));
        }
        if (norm(psi) - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization(format!(
                "trajectory vector norm {} is not 1",
                norm(psi)
            )));
        }
        let mut coefficients = vec![Complex64::new(0.0, 0.0); self.vectors.len()];
        let mut residual = psi.to_vec();
        // modified Gram-Schmidt, then one full re-orthogonalization pass
        // (twice is enough)
        for _pass in 0..2 {
            for (n, k) in self.vectors.iter().enumerate() {
                let c = inner(k, &residual);
                coefficients[n] += c;
                for (r, kx) in residual.iter_mut().zip(k) {
                    *r -= c * kx;
                }
            }
        }
        let residual_norm = norm(&residual);
        let extended = residual_norm > self.tolerance;
        if extended {
            if self.vectors.len() == self.ambient_dim {
                return Err(Error::NumericalInconsistency(format!(
                    "residual {residual_norm:.3e} above tolerance with a complete basis of size {}",
                    self.ambient_dim
                )));
            }
            let inv = 1.0 / residual_norm;
            for r in &mut residual {
                *r *= inv;
            }
            self.vectors.push(residual);
            coefficients.push(Complex64::new(residual_norm, 0.0));
        }
        Ok(CoefficientRecord {
            time_step,
            coefficients,
            residual_norm,
            extended_basis: extended,
        })
    }

    /// Largest pairwise |<K_i|K_j>| (i != j) and worst norm deviation.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.vectors.len() {
            for j in i..self.vectors.len() {
                let ip = inner(&self.vectors[i], &self.vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Spread complexity of one coefficient record: `C = Σ n |phi_n|²` with
/// 0-based ordinal n.
pub fn spread_complexity(record: &CoefficientRecord) -> f64 {
    record
        .coefficients
        .iter()
        .enumerate()
        .map(|(n, c)| n as f64 * c.norm_sqr())
        .sum()
}

/// Time-indexed complexity values, optionally disorder-averaged.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ComplexitySeries {
    pub values: Vec<f64>,
    pub sample_count: usize,
    /// Standard errors, present for averaged series.
    pub stderr: Option<Vec<f64>>,
    pub t_sat: Option<usize>,
    pub c_inf: Option<f64>,
}

impl ComplexitySeries {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values, sample_count: 1, stderr: None, t_sat: None, c_inf: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Run the Krylov recursion over a generic unit-vector trajectory.
///
/// `step` advances the trajectory in place; it is called T times.
pub fn run_trajectory_complexity<F>(v0: Vec<Complex64>, steps: usize, step: F) -> Result<(ComplexitySeries, KrylovBasis)>
where
    F: FnMut(&mut Vec<Complex64>, usize) -> Result<()>,
{
    let (series, _, basis) = run_trajectory_complexity_tracked(v0, steps, step)?;
    Ok((series, basis))
}

/// Like [`run_trajectory_complexity`], additionally reporting the basis
/// dimension after each step (`dims[t]` for t = 0..=steps, `dims[0] = 1`).
/// The basis-acquisition time — the first t at which the dimension stops
/// growing — is the saturation observable for monitored circuits.
pub fn run_trajectory_complexity_tracked<F>(
    v0: Vec<Complex64>,
    steps: usize,
    mut step: F,
) -> Result<(ComplexitySeries, Vec<usize>, KrylovBasis)>
where
    F: FnMut(&mut Vec<Complex64>, usize) -> Result<()>,
{
    let mut basis = KrylovBasis::with_default_tol(v0.clone())?;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(0.0); // C(0) = 0 by construction
    let mut dims = Vec::with_capacity(steps + 1);
    dims.push(1);
    let mut v = v0;
    for t in 1..=steps {
        step(&mut v, t)?;
        let record = basis.extend_and_project(&v, t)?;
        values.push(spread_complexity(&record));
        dims.push(basis.len());
    }
    Ok((ComplexitySeries::from_values(values), dims, basis))
}

/// State spread complexity under a step evolver `state -> state`.
pub fn run_state_complexity<F>(
    psi0: &QuantumState,
    steps: usize,
    evolver: F,
) -> Result<(ComplexitySeries, KrylovBasis)>
where
    F: FnMut(&mut QuantumState, usize) -> Result<()>,
{
    let (series, _, basis) = run_state_complexity_tracked(psi0, steps, evolver)?;
    Ok((series, basis))
}

/// State-evolver variant of [`run_trajectory_complexity_tracked`].
pub fn run_state_complexity_tracked<F>(
    psi0: &QuantumState,
    steps: usize,
    mut evolver: F,
) -> Result<(ComplexitySeries, Vec<usize>, KrylovBasis)>
where
    F: FnMut(&mut QuantumState, usize) -> Result<()>,
{
    let mut state = psi0.clone();
    run_trajectory_complexity_tracked(psi0.amplitudes().to_vec(), steps, move |v, t| {
        evolver(&mut state, t)?;
        v.clear();
        v.extend_from_slice(state.amplitudes());
        Ok(())
    })
}

/// Vectorize an operator under the normalized Hilbert-Schmidt inner product
/// `(A|B) = Tr(A†B)/D`, so that ordinary vector inner products reproduce it.
pub fn vectorize_operator(op: &CMatrix) -> Vec<Complex64> {
    let d = op.nrows() as f64;
    let scale = 1.0 / d.sqrt();
    op.iter().map(|x| x * scale).collect()
}

/// Operator K-complexity under a Heisenberg step evolver `O -> U†OU`.
///
/// `o0` must be normalized under `(A|B) = Tr(A†B)/D`.
pub fn run_operator_complexity<F>(
    o0: &CMatrix,
    steps: usize,
    mut evolver: F,
) -> Result<(ComplexitySeries, KrylovBasis)>
where
    F: FnMut(&mut CMatrix, usize) -> Result<()>,
{
    let d = o0.nrows();
    if o0.ncols() != d {
        return Err(Error::InvalidDimension("operator must be square".into()));
    }
    let v0 = vectorize_operator(o0);
    let n0 = norm(&v0);
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(format!(
            "operator Hilbert-Schmidt norm {n0} is not 1"
        )));
    }
    let mut op = o0.clone();
    run_trajectory_complexity(v0, steps, move |v, t| {
        evolver(&mut op, t)?;
        *v = vectorize_operator(&op);
        Ok(())
    })
}

/// Plateau-mean saturation estimator.
///
/// `c_inf` is the mean of the final `window` values; `t_sat` the first time
/// the series reaches `(1 - rel_tol) * c_inf`.
pub fn detect_saturation(values: &[f64], window: usize, rel_tol: f64) -> Result<(usize, f64)> {
    if window == 0 {
        return Err(Error::InvalidParameter("saturation window must be >= 1".into()));
    }
    if values.len() <= window {
        return Err(Error::InsufficientData(format!(
            "series of length {} too short for window {window}",
            values.len()
        )));
    }
    let tail = &values[values.len() - window..];
    let c_inf = tail.iter().sum::<f64>() / window as f64;
    let threshold = (1.0 - rel_tol) * c_inf;
    let t_sat = values
        .iter()
        .position(|&c| c >= threshold)
        .ok_or_else(|| Error::NumericalInconsistency("plateau mean above every series value".into()))?;
    Ok((t_sat, c_inf))
}

/// Default plateau window for a series of length T+1: max(10, T/10).
pub fn default_window(steps: usize) -> usize {
    (steps / 10).max(10)
}

/// Default saturation threshold tolerance.
pub const DEFAULT_SATURATION_REL_TOL: f64 = 0.05;
