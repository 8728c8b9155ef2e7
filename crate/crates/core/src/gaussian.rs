//! Floquet Gaussian (free-fermion) circuits in the Majorana single-particle
//! picture.
//!
//! A system of N fermionic pairs has 2N Majorana coordinates ordered as
//! `(q_1, p_1, ..., q_N, p_N)`; site i owns coordinates (2i-2, 2i-1). One
//! Floquet step is the orthogonal matrix `O = G (⊕Q_i) Gᵀ (⊕P_i)` where G is
//! the cyclic one-site shift and the 4x4 blocks are drawn from O(4)/SO(4).

use num_complex::Complex64;
use rand::Rng;

use crate::ensembles::{orthogonality_defect, sample_orthogonal, sample_special_orthogonal, RMatrix};
use crate::error::{Error, Result};
use crate::krylov::{run_trajectory_complexity, ComplexitySeries, KrylovBasis};

/// Determinant sector for the two-site blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockEnsemble {
    So4,
    O4,
}

/// Inner-product space fed to the Krylov engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianMode {
    /// Trajectory `v(t) = Oᵗ v0` in the real 2N-dimensional Majorana space.
    SingleParticle,
    /// Trajectory `Ω(t) = Oᵗ Ω (Oᵗ)ᵀ` under `⟨A,B⟩ = Tr(AᵀB)/(2N)`.
    CovarianceHs,
}

/// The 2N x 2N Floquet orthogonal and its homogeneity flag.
#[derive(Debug, Clone)]
pub struct FloquetOrthogonal {
    pub n_pairs: usize,
    pub matrix: RMatrix,
    pub homogeneous: bool,
}

/// Cyclic one-site shift on 2N Majorana coordinates: block-row i carries the
/// 2x2 identity in block-column (i-1 mod N).
pub fn shift_matrix(n_pairs: usize) -> Result<RMatrix> {
    if n_pairs < 2 || n_pairs % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "shift matrix needs an even number of pairs >= 2, got {n_pairs}"
        )));
    }
    let dim = 2 * n_pairs;
    let mut g = RMatrix::zeros(dim, dim);
    for block_row in 0..n_pairs {
        let block_col = (block_row + n_pairs - 1) % n_pairs;
        g[(2 * block_row, 2 * block_col)] = 1.0;
        g[(2 * block_row + 1, 2 * block_col + 1)] = 1.0;
    }
    Ok(g)
}

fn direct_sum(blocks: &[RMatrix], n_pairs: usize) -> Result<RMatrix> {
    if blocks.len() != n_pairs / 2 {
        return Err(Error::Layer(format!(
            "expected {} blocks of dim 4, got {}",
            n_pairs / 2,
            blocks.len()
        )));
    }
    let dim = 2 * n_pairs;
    let mut m = RMatrix::zeros(dim, dim);
    for (i, b) in blocks.iter().enumerate() {
        if b.nrows() != 4 || b.ncols() != 4 {
            return Err(Error::Layer("Gaussian blocks must be 4x4".into()));
        }
        for r in 0..4 {
            for c in 0..4 {
                m[(4 * i + r, 4 * i + c)] = b[(r, c)];
            }
        }
    }
    Ok(m)
}

/// `O = G (⊕Q_i) Gᵀ (⊕P_i)`; the P layer couples sites (2i-1, 2i), the
/// G-conjugated Q layer the complementary pairs.
pub fn build_floquet_orthogonal(
    p_blocks: &[RMatrix],
    q_blocks: &[RMatrix],
    n_pairs: usize,
) -> Result<RMatrix> {
    let g = shift_matrix(n_pairs)?;
    let p = direct_sum(p_blocks, n_pairs)?;
    let q = direct_sum(q_blocks, n_pairs)?;
    Ok(&g * q * g.transpose() * p)
}

/// Draw one disorder realization of the Floquet orthogonal.
///
/// Homogeneous: a single (P, Q) pair tiled across all blocks. Inhomogeneous:
/// independent blocks per position.
pub fn sample_floquet<R: Rng>(
    n_pairs: usize,
    homogeneous: bool,
    ensemble: BlockEnsemble,
    rng: &mut R,
) -> Result<FloquetOrthogonal> {
    if n_pairs < 2 || n_pairs % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "Gaussian circuit needs an even number of pairs >= 2, got {n_pairs}"
        )));
    }
    let draw = |rng: &mut R| -> Result<RMatrix> {
        match ensemble {
            BlockEnsemble::So4 => sample_special_orthogonal(4, rng),
            BlockEnsemble::O4 => sample_orthogonal(4, rng),
        }
    };
    let half = n_pairs / 2;
    let (p_blocks, q_blocks) = if homogeneous {
        let p = draw(rng)?;
        let q = draw(rng)?;
        (vec![p; half], vec![q; half])
    } else {
        let p: Result<Vec<_>> = (0..half).map(|_| draw(rng)).collect();
        let q: Result<Vec<_>> = (0..half).map(|_| draw(rng)).collect();
        (p?, q?)
    };
    Ok(FloquetOrthogonal {
        n_pairs,
        matrix: build_floquet_orthogonal(&p_blocks, &q_blocks, n_pairs)?,
        homogeneous,
    })
}

/// `Ω -> O Ω Oᵀ`.
pub fn evolve_covariance(omega: &RMatrix, o: &RMatrix) -> RMatrix {
    o * omega * o.transpose()
}

/// Covariance matrix of the product state `⊕_i [[0,1],[-1,0]]`.
pub fn product_state_covariance(n_pairs: usize) -> RMatrix {
    let dim = 2 * n_pairs;
    let mut omega = RMatrix::zeros(dim, dim);
    for i in 0..n_pairs {
        omega[(2 * i, 2 * i + 1)] = 1.0;
        omega[(2 * i + 1, 2 * i)] = -1.0;
    }
    omega
}

/// Tracks `Oᵗ`, re-orthogonalizing by QR when the drift exceeds 1e-9.
pub struct OrthogonalPower {
    step_matrix: RMatrix,
    power: RMatrix,
}

impl OrthogonalPower {
    pub fn new(o: RMatrix) -> Self {
        let dim = o.nrows();
        Self { step_matrix: o, power: RMatrix::identity(dim, dim) }
    }

    pub fn advance(&mut self) {
        self.power = &self.step_matrix * &self.power;
        if orthogonality_defect(&self.power) > 1e-9 {
            let qr = self.power.clone().qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..q.ncols() {
                if r[(j, j)] < 0.0 {
                    for i in 0..q.nrows() {
                        q[(i, j)] = -q[(i, j)];
                    }
                }
            }
            self.power = q;
        }
    }

    pub fn power(&self) -> &RMatrix {
        &self.power
    }
}

fn real_to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Spread complexity of the Floquet Gaussian evolution.
///
/// In `SingleParticle` mode `v0` must be a unit vector of length 2N (default
/// impurity vector e0 when `None`). In `CovarianceHs` mode the initial
/// covariance is the product state and `v0` is ignored.
pub fn run_gaussian_complexity(
    floquet: &FloquetOrthogonal,
    v0: Option<Vec<f64>>,
    steps: usize,
    mode: GaussianMode,
) -> Result<(ComplexitySeries, KrylovBasis)> {
    let dim = 2 * floquet.n_pairs;
    match mode {
        GaussianMode::SingleParticle => {
            let mut v = match v0 {
                Some(v) => {
                    if v.len() != dim {
                        return Err(Error::InvalidDimension(format!(
                            "initial vector length {} != 2N = {dim}",
                            v.len()
                        )));
                    }
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > 1e-10 {
                        return Err(Error::Normalization(format!(
                            "initial vector norm {norm} is not 1"
                        )));
                    }
                    v
                }
                None => {
                    let mut e0 = vec![0.0; dim];
                    e0[0] = 1.0;
                    e0
                }
            };
            let o = &floquet.matrix;
            run_trajectory_complexity(real_to_complex(&v), steps, move |vc, _t| {
                let mut next = vec![0.0; dim];
                for i in 0..dim {
                    let mut acc = 0.0;
                    for j in 0..dim {
                        acc += o[(i, j)] * v[j];
                    }
                    next[i] = acc;
                }
                normalize(&mut next);
                v = next;
                *vc = real_to_complex(&v);
                Ok(())
            })
        }
        GaussianMode::CovarianceHs => {
            let mut omega = product_state_covariance(floquet.n_pairs);
            let scale = 1.0 / (dim as f64).sqrt();
            let vectorize = move |m: &RMatrix| -> Vec<Complex64> {
                m.iter().map(|&x| Complex64::new(x * scale, 0.0)).collect()
            };
            let o = floquet.matrix.clone();
            let v0 = vectorize(&omega);
            run_trajectory_complexity(v0, steps, move |vc, _t| {
                omega = evolve_covariance(&omega, &o);
                *vc = vectorize(&omega);
                Ok(())
            })
        }
    }
}
