//! Randomized invariants (proptest): every case draws its own seed, so the
//! space probed grows over runs while failures reproduce from the printed
//! seed.

mod common;

use common::*;
use proptest::prelude::*;

use krylov_circuits::analytics::partial_coverage_distribution;
use krylov_circuits::ensembles::sample_haar_unitary;
use krylov_circuits::krylov::{spread_complexity, KrylovBasis};
use krylov_circuits::rng::stream;
use krylov_circuits::state::{brickwork_step, Boundary, BrickworkLayer, Parity};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn krylov_basis_stays_orthonormal(seed in any::<u64>(), dim in 2usize..24, steps in 1usize..30) {
        let mut rng = stream(seed, &[91]);
        let mut basis = KrylovBasis::with_default_tol(
            random_state_vector(dim, &mut rng)
        ).unwrap();
        for t in 1..=steps {
            let record = basis.extend_and_project(&random_state_vector(dim, &mut rng), t).unwrap();
            let c = spread_complexity(&record);
            prop_assert!(c >= 0.0 && c <= (basis.len() - 1) as f64 + 1e-9);
            let total: f64 = record.coefficients.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
        prop_assert!(basis.orthonormality_defect() < 1e-10);
        prop_assert!(basis.len() <= dim);
    }

    #[test]
    fn brickwork_steps_preserve_norm(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = stream(seed, &[92]);
        let mut state = random_state(n, &mut rng);
        for _ in 0..5 {
            let draw = |r: &mut rand_chacha::ChaCha12Rng| sample_haar_unitary(4, r);
            let even = BrickworkLayer::sample(n, Parity::Even, Boundary::Open, &mut rng, draw).unwrap();
            let odd = BrickworkLayer::sample(n, Parity::Odd, Boundary::Open, &mut rng, draw).unwrap();
            brickwork_step(&mut state, &odd, &even).unwrap();
        }
        prop_assert!((state.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn measurements_keep_states_normalized(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = stream(seed, &[93]);
        let mut state = random_state(n, &mut rng);
        for site in 0..n {
            state.measure_site(site, &mut rng).unwrap();
            prop_assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_coverage_is_a_distribution(n in 1u64..400, d in 1u64..64) {
        let dist = partial_coverage_distribution(n, d).unwrap();
        let total: f64 = dist.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(dist.iter().all(|&p| p >= -1e-15));
        // no more distinct values than draws or outcomes
        for (m, &p) in dist.iter().enumerate() {
            if m as u64 > n.min(d) {
                prop_assert!(p.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn streams_are_deterministic_and_path_sensitive(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        use rand::RngCore;
        let x = stream(seed, &[a, b]).next_u64();
        prop_assert_eq!(x, stream(seed, &[a, b]).next_u64());
        if a != b {
            // path order matters: [a, b] and [b, a] address different streams
            prop_assert_ne!(x, stream(seed, &[b, a]).next_u64());
        }
    }
}

fn random_state_vector<R: rand::Rng>(dim: usize, rng: &mut R) -> Vec<num_complex::Complex64> {
    use rand_distr::StandardNormal;
    let mut v: Vec<num_complex::Complex64> = (0..dim)
        .map(|_| num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}
