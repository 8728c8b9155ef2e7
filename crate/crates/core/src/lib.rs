//! Krylov spread complexity for discrete-time random quantum circuits.
//!
//! The crate simulates three circuit families and measures how fast an
//! evolving state (or Heisenberg operator) spreads over the Krylov basis
//! built from its own trajectory:
//!
//! * brickwork Haar circuits with optional randomized projective
//!   measurements ([`state`], [`runner`]),
//! * Floquet Gaussian (free-fermion) circuits in the Majorana
//!   single-particle picture ([`gaussian`]),
//! * Floquet spin circuits with Haar or MBL-distributed gates ([`spins`]).
//!
//! Closed-form predictions and coupon-collector combinatorics live in
//! [`analytics`]; the Krylov recursion itself in [`krylov`].

pub mod analytics;
pub mod ensembles;
pub mod error;
pub mod gaussian;
pub mod krylov;
pub mod rng;
pub mod runner;
pub mod spins;
pub mod state;
pub mod stats;

pub use analytics::{aggregate, expected_complexity_haar, AveragedSeries};
pub use ensembles::{sample_haar_unitary, sample_mbl_gate, sample_special_orthogonal, GateEnsemble};
pub use error::{Error, Result};
pub use krylov::{detect_saturation, spread_complexity, ComplexitySeries, KrylovBasis};
pub use state::{Boundary, BrickworkLayer, QuantumState};
