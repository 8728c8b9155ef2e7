//! Exact statevector evolution of N-qubit brickwork circuits with optional
//! per-site projective Z measurements.
//!
//! Indexing is 0-based throughout: qubit `i` is bit `i` of the basis index
//! (little-endian), the even layer couples links (0,1),(2,3),..., the odd
//! layer couples (1,2),(3,4),... and, for periodic boundaries on even N, the
//! wrap link (N-1, 0).

use num_complex::Complex64;
use rand::Rng;

use crate::ensembles::CMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Z-measurement outcome: `+` projects onto |0>, `-` onto |1>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub time_step: usize,
    pub site: usize,
    pub outcome: Outcome,
    pub born_probability: f64,
}

/// Pure state of `n_qubits` qubits as a dense unit-norm amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidDimension("need at least one qubit".into()));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Default initial state |↑↓↑↓...⟩: odd sites carry bit 1.
    pub fn alternating(n_qubits: usize) -> Result<Self> {
        let mut index = 0usize;
        for i in (1..n_qubits).step_by(2) {
            index |= 1 << i;
        }
        Self::basis(n_qubits, index)
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::InvalidDimension(format!(
                "expected {} amplitudes, got {}",
                1usize << n_qubits,
                amplitudes.len()
            )));
        }
        let state = Self { n_qubits, amplitudes };
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization(format!(
                "state norm {} is not 1",
                state.norm()
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amplitudes {
                *a *= inv;
            }
        }
    }

    /// Resolve link `x` to the qubit pair it couples.
    fn link_qubits(&self, x: usize, boundary: Boundary) -> Result<(usize, usize)> {
        let n = self.n_qubits;
        match boundary {
            Boundary::Open => {
                if x + 1 >= n {
                    Err(Error::IndexOutOfRange(format!(
                        "link ({x},{}) out of range for {n} qubits (open boundary)",
                        x + 1
                    )))
                } else {
                    Ok((x, x + 1))
                }
            }
            Boundary::Periodic => {
                if x >= n {
                    Err(Error::IndexOutOfRange(format!(
                        "link {x} out of range for {n} qubits (periodic boundary)"
                    )))
                } else {
                    Ok((x, (x + 1) % n))
                }
            }
        }
    }

    /// Apply a two-qubit gate on link `(x, x+1)`.
    ///
    /// The gate's 4-dim index orders the pair as `|b_x b_{x+1}>` with `b_x`
    /// the high bit.
    pub fn apply_two_qubit_gate(&mut self, gate: &CMatrix, x: usize, boundary: Boundary) -> Result<()> {
        if gate.nrows() != 4 || gate.ncols() != 4 {
            return Err(Error::InvalidDimension("two-qubit gate must be 4x4".into()));
        }
        let (qa, qb) = self.link_qubits(x, boundary)?;
        let ma = 1usize << qa;
        let mb = 1usize << qb;
        let dim = self.dim();
        let pair = ma | mb;
        let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = gate[(i, j)];
            }
        }
        for base in 0..dim {
            if base & pair != 0 {
                continue;
            }
            // gate index g = 2*b_a + b_b
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let v = [
                self.amplitudes[idx[0]],
                self.amplitudes[idx[1]],
                self.amplitudes[idx[2]],
                self.amplitudes[idx[3]],
            ];
            for (row, &i) in idx.iter().enumerate() {
                self.amplitudes[i] =
                    g[row][0] * v[0] + g[row][1] * v[1] + g[row][2] * v[2] + g[row][3] * v[3];
            }
        }
        Ok(())
    }

    /// Born probability of outcome `+` (bit 0) on `site`.
    pub fn plus_probability(&self, site: usize) -> Result<f64> {
        if site >= self.n_qubits {
            return Err(Error::IndexOutOfRange(format!(
                "site {site} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let mask = 1usize << site;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective Z measurement of `site`, collapsing the state.
    ///
    /// If one outcome has probability below 1e-14 the other is taken
    /// deterministically.
    pub fn measure_site<R: Rng>(&mut self, site: usize, rng: &mut R) -> Result<MeasurementRecord> {
        let p_plus = self.plus_probability(site)?;
        let outcome = if p_plus < 1e-14 {
            Outcome::Minus
        } else if p_plus > 1.0 - 1e-14 {
            Outcome::Plus
        } else if rng.gen::<f64>() < p_plus {
            Outcome::Plus
        } else {
            Outcome::Minus
        };
        let mask = 1usize << site;
        let keep_bit = match outcome {
            Outcome::Plus => 0,
            Outcome::Minus => mask,
        };
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask != keep_bit {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.renormalize();
        let born_probability = match outcome {
            Outcome::Plus => p_plus,
            Outcome::Minus => 1.0 - p_plus,
        };
        Ok(MeasurementRecord {
            time_step: 0,
            site,
            outcome,
            born_probability,
        })
    }
}

/// One half-layer of a brickwork step: disjoint two-site gates of one parity.
#[derive(Debug, Clone)]
pub struct BrickworkLayer {
    pub parity: Parity,
    pub gates: Vec<(usize, CMatrix)>,
    pub boundary: Boundary,
}

/// Link positions of a given parity for `n` qubits.
pub fn layer_links(n: usize, parity: Parity, boundary: Boundary) -> Vec<usize> {
    let start = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let mut links: Vec<usize> = (start..n.saturating_sub(1)).step_by(2).collect();
    // periodic wrap link (N-1, 0) exists for even N and has odd parity
    if boundary == Boundary::Periodic && parity == Parity::Odd && n >= 2 && n % 2 == 0 {
        links.push(n - 1);
    }
    links
}

impl BrickworkLayer {
    pub fn new(
        n: usize,
        parity: Parity,
        boundary: Boundary,
        gates: Vec<(usize, CMatrix)>,
    ) -> Result<Self> {
        let valid = layer_links(n, parity, boundary);
        let mut seen = std::collections::HashSet::new();
        for (x, g) in &gates {
            if g.nrows() != 4 || g.ncols() != 4 {
                return Err(Error::Layer(format!("gate on link {x} is not 4x4")));
            }
            if !valid.contains(x) {
                return Err(Error::Layer(format!(
                    "link {x} does not belong to the {parity:?} layer for {n} qubits"
                )));
            }
            if !seen.insert(*x) {
                return Err(Error::Layer(format!("duplicate link {x} in layer")));
            }
        }
        Ok(Self { parity, gates, boundary })
    }

    /// Layer with one freshly sampled gate on every link of the parity.
    pub fn sample<R: Rng, F: FnMut(&mut R) -> Result<CMatrix>>(
        n: usize,
        parity: Parity,
        boundary: Boundary,
        rng: &mut R,
        mut draw: F,
    ) -> Result<Self> {
        let mut gates = Vec::new();
        for x in layer_links(n, parity, boundary) {
            gates.push((x, draw(rng)?));
        }
        Self::new(n, parity, boundary, gates)
    }

    pub fn identity(n: usize, parity: Parity, boundary: Boundary) -> Result<Self> {
        let eye = CMatrix::identity(4, 4);
        let gates = layer_links(n, parity, boundary)
            .into_iter()
            .map(|x| (x, eye.clone()))
            .collect();
        Self::new(n, parity, boundary, gates)
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        for (x, g) in &self.gates {
            state.apply_two_qubit_gate(g, *x, self.boundary)?;
        }
        Ok(())
    }
}

/// One brickwork step `U_t = U^(o) · U^(e)`: even layer first, then odd.
pub fn brickwork_step(
    state: &mut QuantumState,
    odd_layer: &BrickworkLayer,
    even_layer: &BrickworkLayer,
) -> Result<()> {
    if odd_layer.parity != Parity::Odd || even_layer.parity != Parity::Even {
        return Err(Error::Layer("layer parity mismatch".into()));
    }
    even_layer.apply(state)?;
    odd_layer.apply(state)?;
    Ok(())
}

/// Independent Bernoulli(p) measurement pass over all sites.
fn measurement_pass<R: Rng>(
    state: &mut QuantumState,
    p: f64,
    rng: &mut R,
    records: &mut Vec<MeasurementRecord>,
) -> Result<()> {
    for site in 0..state.n_qubits() {
        if rng.gen::<f64>() < p {
            records.push(state.measure_site(site, rng)?);
        }
    }
    Ok(())
}

/// Monitored brickwork step: even layer, measurement pass, odd layer,
/// measurement pass (the `M U^(o) M U^(e)` interleaving).
pub fn monitored_step<R: Rng>(
    state: &mut QuantumState,
    odd_layer: &BrickworkLayer,
    even_layer: &BrickworkLayer,
    p: f64,
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>> {
    monitored_step_with(state, odd_layer, even_layer, p, MeasurementSchedule::PerHalfLayer, rng)
}

/// Where the Bernoulli measurement passes sit inside one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementSchedule {
    /// One pass after each half-layer (default, `M U^(o) M U^(e)`).
    PerHalfLayer,
    /// A single pass after the full step.
    PerStep,
}

pub fn monitored_step_with<R: Rng>(
    state: &mut QuantumState,
    odd_layer: &BrickworkLayer,
    even_layer: &BrickworkLayer,
    p: f64,
    schedule: MeasurementSchedule,
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "measurement rate must lie in [0,1], got {p}"
        )));
    }
    if odd_layer.parity != Parity::Odd || even_layer.parity != Parity::Even {
        return Err(Error::Layer("layer parity mismatch".into()));
    }
    let mut records = Vec::new();
    match schedule {
        MeasurementSchedule::PerHalfLayer => {
            even_layer.apply(state)?;
            measurement_pass(state, p, rng, &mut records)?;
            odd_layer.apply(state)?;
            measurement_pass(state, p, rng, &mut records)?;
        }
        MeasurementSchedule::PerStep => {
            even_layer.apply(state)?;
            odd_layer.apply(state)?;
            measurement_pass(state, p, rng, &mut records)?;
        }
    }
    Ok(records)
}
