//! Gaussian Floquet construction against explicit block/permutation oracles.

mod common;

use krylov_circuits::ensembles::{orthogonality_defect, RMatrix};
use krylov_circuits::gaussian::{
    build_floquet_orthogonal, evolve_covariance, product_state_covariance,
    run_gaussian_complexity, sample_floquet, shift_matrix, BlockEnsemble, GaussianMode,
    OrthogonalPower,
};
use krylov_circuits::rng::stream;

fn max_abs(m: &RMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

#[test]
fn shift_matrix_small_example() {
    // N = 2: block-row 0 holds I2 in block-column 1 and vice versa
    let g = shift_matrix(2).unwrap();
    let mut expected = RMatrix::zeros(4, 4);
    expected[(0, 2)] = 1.0;
    expected[(1, 3)] = 1.0;
    expected[(2, 0)] = 1.0;
    expected[(3, 1)] = 1.0;
    assert_eq!(g, expected);
}

#[test]
fn shift_matrix_is_cyclic_permutation() {
    for n in [2usize, 4, 6, 8] {
        let g = shift_matrix(n).unwrap();
        let dim = 2 * n;
        assert!(max_abs(&(g.transpose() * &g - RMatrix::identity(dim, dim))) == 0.0);
        let mut power = RMatrix::identity(dim, dim);
        for _ in 0..n {
            power = &g * power;
        }
        assert!(max_abs(&(power - RMatrix::identity(dim, dim))) == 0.0);
    }
    assert!(shift_matrix(3).is_err());
    assert!(shift_matrix(0).is_err());
}

#[test]
fn identity_blocks_build_identity_floquet() {
    let n = 4usize;
    let blocks = vec![RMatrix::identity(4, 4); n / 2];
    let o = build_floquet_orthogonal(&blocks, &blocks, n).unwrap();
    assert!(max_abs(&(o - RMatrix::identity(2 * n, 2 * n))) < 1e-15);
}

#[test]
fn floquet_matrix_is_orthogonal() {
    let mut rng = stream(41, &[0]);
    for ensemble in [BlockEnsemble::So4, BlockEnsemble::O4] {
        for homogeneous in [true, false] {
            let f = sample_floquet(4, homogeneous, ensemble, &mut rng).unwrap();
            assert!(orthogonality_defect(&f.matrix) < 1e-12);
        }
    }
}

#[test]
fn homogeneous_floquet_commutes_with_two_site_translation() {
    let mut rng = stream(42, &[0]);
    let n = 6usize;
    let f = sample_floquet(n, true, BlockEnsemble::So4, &mut rng).unwrap();
    let g = shift_matrix(n).unwrap();
    let g2 = &g * &g;
    let diff = &f.matrix * &g2 - g2 * &f.matrix;
    assert!(max_abs(&diff) < 1e-10);
}

#[test]
fn inhomogeneous_floquet_generically_breaks_translation() {
    let mut rng = stream(43, &[0]);
    let n = 6usize;
    let f = sample_floquet(n, false, BlockEnsemble::So4, &mut rng).unwrap();
    let g = shift_matrix(n).unwrap();
    let g2 = &g * &g;
    let diff = &f.matrix * &g2 - g2 * &f.matrix;
    assert!(max_abs(&diff) > 1e-3);
}

#[test]
fn covariance_evolution_matches_dense_oracle() {
    let mut rng = stream(44, &[0]);
    let n = 4usize; // "N=3" pairs is not representable (blocks pair sites); use the smallest even N > 2
    let f = sample_floquet(n, false, BlockEnsemble::O4, &mut rng).unwrap();
    let omega = product_state_covariance(n);
    let evolved = evolve_covariance(&omega, &f.matrix);
    let oracle = &f.matrix * &omega * f.matrix.transpose();
    assert_eq!(evolved, oracle);
}

#[test]
fn product_state_covariance_is_pure_and_antisymmetric() {
    let n = 6usize;
    let omega = product_state_covariance(n);
    let dim = 2 * n;
    assert!(max_abs(&(&omega + omega.transpose())) == 0.0);
    assert!(max_abs(&(omega.transpose() * &omega - RMatrix::identity(dim, dim))) == 0.0);
}

#[test]
fn purity_is_preserved_under_evolution() {
    let mut rng = stream(45, &[0]);
    let n = 4usize;
    let f = sample_floquet(n, true, BlockEnsemble::So4, &mut rng).unwrap();
    let mut omega = product_state_covariance(n);
    for _ in 0..50 {
        omega = evolve_covariance(&omega, &f.matrix);
    }
    let dim = 2 * n;
    assert!(max_abs(&(omega.transpose() * &omega - RMatrix::identity(dim, dim))) < 1e-8);
}

#[test]
fn orthogonal_power_stays_orthogonal_over_long_runs() {
    let mut rng = stream(46, &[0]);
    let f = sample_floquet(4, false, BlockEnsemble::So4, &mut rng).unwrap();
    let mut power = OrthogonalPower::new(f.matrix.clone());
    for _ in 0..10_000 {
        power.advance();
    }
    assert!(orthogonality_defect(power.power()) < 1e-9);
}

#[test]
fn identity_floquet_gives_zero_complexity() {
    let n = 4usize;
    let f = krylov_circuits::gaussian::FloquetOrthogonal {
        n_pairs: n,
        matrix: RMatrix::identity(2 * n, 2 * n),
        homogeneous: true,
    };
    for mode in [GaussianMode::SingleParticle, GaussianMode::CovarianceHs] {
        let (series, _) = run_gaussian_complexity(&f, None, 30, mode).unwrap();
        assert_eq!(series.values, vec![0.0; 31]);
    }
}

#[test]
fn single_particle_mode_rejects_bad_initial_vectors() {
    let mut rng = stream(47, &[0]);
    let f = sample_floquet(4, true, BlockEnsemble::So4, &mut rng).unwrap();
    assert!(run_gaussian_complexity(&f, Some(vec![1.0; 3]), 5, GaussianMode::SingleParticle).is_err());
    assert!(
        run_gaussian_complexity(&f, Some(vec![0.5; 8]), 5, GaussianMode::SingleParticle).is_err()
    );
}

#[test]
fn single_particle_complexity_is_bounded_by_ambient_dimension() {
    let mut rng = stream(48, &[0]);
    let n = 8usize;
    let f = sample_floquet(n, false, BlockEnsemble::So4, &mut rng).unwrap();
    let (series, basis) =
        run_gaussian_complexity(&f, None, 200, GaussianMode::SingleParticle).unwrap();
    assert!(basis.len() <= 2 * n);
    for v in &series.values {
        assert!(*v >= 0.0 && *v < (2 * n) as f64);
    }
    assert!(basis.orthonormality_defect() < 1e-10);
}

#[test]
fn rotation_in_a_plane_alternates_complexity() {
    // O = rotation by pi/2 in the (0,1) plane: v0 = e0 cycles through
    // e1, -e0, -e1, e0, ...; the Krylov space is two-dimensional
    let n = 2usize;
    let dim = 2 * n;
    let mut o = RMatrix::identity(dim, dim);
    o[(0, 0)] = 0.0;
    o[(0, 1)] = -1.0;
    o[(1, 0)] = 1.0;
    o[(1, 1)] = 0.0;
    let f = krylov_circuits::gaussian::FloquetOrthogonal { n_pairs: n, matrix: o, homogeneous: true };
    let (series, basis) =
        run_gaussian_complexity(&f, None, 8, GaussianMode::SingleParticle).unwrap();
    assert_eq!(basis.len(), 2);
    for (t, v) in series.values.iter().enumerate() {
        assert!((v - (t % 2) as f64).abs() < 1e-12, "t={t}");
    }
}
