use zenopure_validation::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zenopure::engine::build_projected_propagator;
use zenopure::linalg::{
    adjoint, deflate, dominant_eigenpair, hermitian_eigendecompose, tensor_product, top_k_eigenpairs,
    unitary_exponential, ComplexMatrix, EIGEN_MAX_ITER, EIGEN_TOL, HERMITIAN_TOL,
};
use zenopure::oscillator::{build_hamiltonian, coefficients, OscillatorModel, OscillatorParams};

fn number_operator(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&(0..dim).map(|n| c(n as f64, 0.0)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn tensor_sum_spectrum_enumerates_index_pairs() {
    let h = tensor_product(&number_operator(3), &ComplexMatrix::identity(2).unwrap())
        .unwrap()
        .try_add(&tensor_product(&ComplexMatrix::identity(3).unwrap(), &number_operator(2)).unwrap())
        .unwrap();
    let mut expected: Vec<f64> = (0..3).flat_map(|i| (0..2).map(move |k| (i + k) as f64)).collect();
    expected.sort_by(f64::total_cmp);
    let eig = hermitian_eigendecompose(&h, HERMITIAN_TOL).unwrap();
    for (got, want) in eig.eigenvalues.iter().zip(&expected) {
        assert!((got - want).abs() < 1e-12);
    }
    // A-major layout: index = i·2 + k
    for i in 0..3 {
        for k in 0..2 {
            assert_eq!(h[(i * 2 + k, i * 2 + k)], c((i + k) as f64, 0.0));
        }
    }
}

#[test]
fn adjoint_moves_across_inner_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let m = random_matrix(&mut rng, 3);
        let x = random_unit_vector(&mut rng, 3);
        let y = random_unit_vector(&mut rng, 3);
        let lhs = x.inner(&m.mul_vec(&y).unwrap()).unwrap();
        let rhs = adjoint(&m).mul_vec(&x).unwrap().inner(&y).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert_eq!(adjoint(&adjoint(&m)), m);
    }
}

#[test]
fn oscillator_hamiltonian_spectrum_matches_determinant_roots() {
    let p = OscillatorParams::figure1(2);
    let sys = build_hamiltonian(&p).unwrap();
    let h = to_dense(sys.hamiltonian());
    let oracle = hermitian_eigenvalues_by_bisection(&h, -1.0, 5.0, 0.01);
    let eig = hermitian_eigendecompose(sys.hamiltonian(), HERMITIAN_TOL).unwrap();
    assert_eq!(oracle.len(), 9);
    for (got, want) in eig.eigenvalues.iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
    // the single-excitation shell splits into 1 ± g
    assert!((oracle[1] - 0.8).abs() < 1e-8 && (oracle[2] - 1.2).abs() < 1e-8);
}

#[test]
fn unitary_exponential_matches_taylor_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let h = random_hermitian(&mut rng, 4);
        let u = unitary_exponential(&h, 0.3).unwrap();
        let series = from_dense(&taylor_unitary(&to_dense(&h), 0.3, 30));
        assert!(max_abs_diff(&u, &series) < 1e-10);
    }
}

#[test]
fn unitary_exponential_group_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let h = random_hermitian(&mut rng, 5);
        let us = unitary_exponential(&h, 0.7).unwrap();
        let ut = unitary_exponential(&h, -1.9).unwrap();
        let ust = unitary_exponential(&h, 0.7 - 1.9).unwrap();
        assert!(max_abs_diff(&us.matmul(&ut).unwrap(), &ust) < 1e-9);
    }
}

#[test]
fn figure1_deflation_exposes_second_eigenvalue() {
    let model = OscillatorModel::new(OscillatorParams::figure1(30)).unwrap();
    let v = model.propagator().unwrap();
    let c0 = coefficients(&model.params).unwrap();
    let top = dominant_eigenpair(v.matrix(), EIGEN_TOL, EIGEN_MAX_ITER, 0).unwrap();
    assert!((top.value - c0.lambda0).norm() < 1e-6);
    let deflated = deflate(v.matrix(), &top).unwrap();
    let next = dominant_eigenpair(&deflated, EIGEN_TOL, EIGEN_MAX_ITER, 0).unwrap();
    assert!((next.value.norm() - c0.abs_exp_c).abs() < 1e-6);
}

#[test]
fn figure1_top_eigenvalues_are_geometric() {
    let model = OscillatorModel::new(OscillatorParams::figure1(30)).unwrap();
    let v = model.propagator().unwrap();
    let c0 = coefficients(&model.params).unwrap();
    let top = top_k_eigenpairs(v.matrix(), 4, EIGEN_TOL).unwrap();
    assert_eq!(top.pairs.len(), 4, "{:?}", top.failure);
    let l0 = top.pairs[0].value;
    for (n, pair) in top.pairs.iter().enumerate() {
        let expected = c0.exp_c.powu(n as u32);
        let got = pair.value / l0;
        assert!((got - expected).norm() <= 1e-5 * expected.norm(), "n={n}: {got} vs {expected}");
    }
}

#[test]
fn engine_propagator_from_random_unitary_is_a_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let sys = zenopure::engine::BipartiteSystem::new(2, 3, random_hermitian(&mut rng, 6)).unwrap();
        let v = build_projected_propagator(&sys, &random_probe(&mut rng, 2), 0.8).unwrap();
        assert!(v.largest_singular_value().unwrap() <= 1.0 + 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dominant_eigenvalue_matches_characteristic_polynomial(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, n);
        let roots = eigenvalues_by_characteristic_polynomial(&to_dense(&m));
        prop_assume!(n == 1 || roots[1].norm() < 0.99 * roots[0].norm());
        let pair = dominant_eigenpair(&m, EIGEN_TOL, EIGEN_MAX_ITER, seed).unwrap();
        prop_assert!((pair.value - roots[0]).norm() <= 1e-7 * roots[0].norm().max(1.0),
            "{} vs {}", pair.value, roots[0]);
    }

    #[test]
    fn top_pairs_are_biorthonormal(seed in any::<u64>(), n in 2usize..=8) {
        let (m, _) = distinct_spectrum(seed, n);
        let top = top_k_eigenpairs(&m, n.min(4), EIGEN_TOL).unwrap();
        prop_assert!(!top.pairs.is_empty());
        for (a, pa) in top.pairs.iter().enumerate() {
            prop_assert!((pa.right.norm() - 1.0).abs() < 1e-12);
            for (b, pb) in top.pairs.iter().enumerate() {
                let overlap = pa.left.inner(&pb.right).unwrap();
                let delta = if a == b { 1.0 } else { 0.0 };
                prop_assert!((overlap - c(delta, 0.0)).norm() <= 1e-8, "({a},{b}) = {overlap}");
            }
        }
    }

    #[test]
    fn eigenvalues_of_projected_propagators_stay_in_unit_disk(
        seed in any::<u64>(), da in 1usize..=3, db in 1usize..=4, tau in 0.0f64..5.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = zenopure::engine::BipartiteSystem::new(da, db, random_hermitian(&mut rng, da * db)).unwrap();
        let v = build_projected_propagator(&sys, &random_probe(&mut rng, da), tau).unwrap();
        let top = top_k_eigenpairs(v.matrix(), db, EIGEN_TOL).unwrap();
        for pair in &top.pairs {
            prop_assert!(pair.value.norm() <= 1.0 + 1e-9);
        }
    }
}
