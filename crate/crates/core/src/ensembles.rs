//! Random matrix ensembles feeding the circuit constructions.
//!
//! Unitaries are drawn exactly from the Haar measure by QR-decomposing a
//! complex Ginibre matrix and absorbing the phases of the R diagonal into Q.
//! Orthogonal ensembles use the real analogue with a sign correction, and
//! SO(dim) is reached by negating the first column when det = -1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Two-site gate distribution for the spin circuits and the Gaussian blocks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateEnsemble {
    /// Haar on U(4).
    HaarU4,
    /// Independent Haar U(2) on each site, `u ⊗ u'`.
    HaarU2,
    /// Haar on SO(4).
    So4,
    /// Haar on O(4), both determinant sectors.
    O4,
    /// `(u1⊗u2)·exp(i a XX + i b YY + i c ZZ)·(u3⊗u4)` with `a,b,c` uniform
    /// on `[-h, h]`.
    Mbl { h: f64 },
}

impl GateEnsemble {
    pub fn mbl(h: f64) -> Result<Self> {
        if !(h >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "MBL coupling half-width must be >= 0, got {h}"
            )));
        }
        Ok(GateEnsemble::Mbl { h })
    }

    /// Draw one two-qubit (4x4) unitary gate from the ensemble.
    ///
    /// The orthogonal kinds are returned as complex matrices with zero
    /// imaginary part; a real orthogonal matrix is a valid unitary.
    pub fn sample_gate<R: Rng>(&self, rng: &mut R) -> Result<CMatrix> {
        match *self {
            GateEnsemble::HaarU4 => sample_haar_unitary(4, rng),
            GateEnsemble::HaarU2 => {
                let a = sample_haar_unitary(2, rng)?;
                let b = sample_haar_unitary(2, rng)?;
                Ok(a.kronecker(&b))
            }
            GateEnsemble::So4 => Ok(complexify(&sample_special_orthogonal(4, rng)?)),
            GateEnsemble::O4 => Ok(complexify(&sample_orthogonal(4, rng)?)),
            GateEnsemble::Mbl { h } => sample_mbl_gate(h, rng),
        }
    }
}

fn complexify(o: &RMatrix) -> CMatrix {
    o.map(|x| Complex64::new(x, 0.0))
}

fn complex_ginibre<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn real_ginibre<R: Rng>(dim: usize, rng: &mut R) -> RMatrix {
    RMatrix::from_fn(dim, dim, |_, _| rng.sample(StandardNormal))
}

/// Haar-random unitary on U(dim).
pub fn sample_haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("unitary dimension must be >= 1".into()));
    }
    let qr = complex_ginibre(dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    // Q from raw QR is unitary but not Haar; multiplying column j by the
    // phase of r_jj makes the distribution exactly Haar.
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Haar-random orthogonal on O(dim), both determinant sectors.
pub fn sample_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> Result<RMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("orthogonal dimension must be >= 1".into()));
    }
    let qr = real_ginibre(dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Haar-random special orthogonal on SO(dim).
///
/// Sampled on O(dim) first; a det = -1 draw is mapped into SO(dim) by
/// negating the first column.
pub fn sample_special_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> Result<RMatrix> {
    let mut q = sample_orthogonal(dim, rng)?;
    if q.determinant() < 0.0 {
        for i in 0..dim {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    Ok(q)
}

/// Magic-basis columns: Bell states on which XX, YY, ZZ are all diagonal.
/// Per column (XX, YY, ZZ) eigenvalues:
///   |Φ+> -> (+1, -1, +1), |Φ-> -> (-1, +1, +1),
///   |Ψ+> -> (+1, +1, -1), |Ψ-> -> (-1, -1, -1).
fn magic_basis() -> RMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    RMatrix::from_row_slice(
        4,
        4,
        &[
            s, s, 0.0, 0.0, //
            0.0, 0.0, s, s, //
            0.0, 0.0, s, -s, //
            s, -s, 0.0, 0.0,
        ],
    )
}

const MAGIC_EIGS: [[f64; 3]; 4] = [
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0],
    [-1.0, -1.0, -1.0],
];

/// MBL-parameterized two-qubit gate
/// `(u1⊗u2)·exp(i a XX + i b YY + i c ZZ)·(u3⊗u4)`.
///
/// The central exponential is assembled in the magic basis where the three
/// two-body Paulis are simultaneously diagonal, so no matrix exponential is
/// needed.
pub fn sample_mbl_gate<R: Rng>(h: f64, rng: &mut R) -> Result<CMatrix> {
    if !(h >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "MBL coupling half-width must be >= 0, got {h}"
        )));
    }
    let u1 = sample_haar_unitary(2, rng)?;
    let u2 = sample_haar_unitary(2, rng)?;
    let u3 = sample_haar_unitary(2, rng)?;
    let u4 = sample_haar_unitary(2, rng)?;
    let (a, b, c) = if h == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        (
            rng.gen_range(-h..=h),
            rng.gen_range(-h..=h),
            rng.gen_range(-h..=h),
        )
    };

    let m = magic_basis();
    let mut center = CMatrix::zeros(4, 4);
    for k in 0..4 {
        let theta = a * MAGIC_EIGS[k][0] + b * MAGIC_EIGS[k][1] + c * MAGIC_EIGS[k][2];
        let phase = Complex64::from_polar(1.0, theta);
        let col: DVector<f64> = m.column(k).into();
        for i in 0..4 {
            for j in 0..4 {
                center[(i, j)] += phase * col[i] * col[j];
            }
        }
    }

    Ok(u1.kronecker(&u2) * center * u3.kronecker(&u4))
}

/// Max-abs entrywise deviation of `U†U` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let d = u.adjoint() * u;
    let n = d.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((d[(i, j)] - target).norm());
        }
    }
    worst
}

/// Max-abs entrywise deviation of `OᵀO` from the identity.
pub fn orthogonality_defect(o: &RMatrix) -> f64 {
    let d = o.transpose() * o;
    let n = d.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((d[(i, j)] - target).abs());
        }
    }
    worst
}
