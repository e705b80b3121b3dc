use zenopure_validation::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zenopure::engine::{
    build_projected_propagator, evolve_step, fidelity, run_purification, spectral_report, survival_probability,
    zeno_limit_scan, zeno_point, BipartiteSystem, DensityMatrix, EngineError, ProjectedPropagator,
    CONDITION_I_EPSILON,
};
use zenopure::linalg::{ComplexMatrix, ComplexVector};
use zenopure::oscillator::{
    closed_form_propagator, coefficients, coherent_state, OscillatorModel, OscillatorParams,
};

fn figure1() -> (OscillatorModel, ProjectedPropagator) {
    let model = OscillatorModel::new(OscillatorParams::figure1(30)).unwrap();
    let v = model.propagator().unwrap();
    (model, v)
}

#[test]
fn propagator_matches_closed_form_on_low_block() {
    let (model, v) = figure1();
    let exact = closed_form_propagator(&model.params).unwrap();
    let low = 11;
    let diff = max_abs_diff(&v.matrix().leading_block(low, low).unwrap(), &exact.leading_block(low, low).unwrap());
    assert!(diff < 1e-6, "{diff:e}");
}

#[test]
fn decoupled_probe_eigenstate_gives_phase_times_free_evolution() {
    let ha = ComplexMatrix::from_real_rows(&[&[0.3, 0.0], &[0.0, -1.1]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let hb = random_hermitian(&mut rng, 3);
    let h = zenopure::linalg::tensor_product(&ha, &ComplexMatrix::identity(3).unwrap())
        .unwrap()
        .try_add(&zenopure::linalg::tensor_product(&ComplexMatrix::identity(2).unwrap(), &hb).unwrap())
        .unwrap();
    let sys = BipartiteSystem::new(2, 3, h).unwrap();
    let phi = zenopure::engine::ProbeState::new(ComplexVector::basis(2, 1).unwrap()).unwrap();
    let tau = 0.9;
    let v = build_projected_propagator(&sys, &phi, tau).unwrap();
    let expected = zenopure::linalg::unitary_exponential(&hb, tau)
        .unwrap()
        .scale(c(0.0, 1.1 * tau).exp());
    assert!(max_abs_diff(v.matrix(), &expected) < 1e-12);
}

#[test]
fn thermal_fidelity_with_purified_coherent_state() {
    let (model, _) = figure1();
    let target = coherent_state(c(0.0, -0.5), 30).unwrap();
    let got = fidelity(&model.initial_state, &target).unwrap();
    // Fock sum Σ pₙ |⟨n|α̃⟩|² with pₙ = (1 − e^{-1}) e^{-n}
    let series: f64 = (0..200)
        .map(|n| (1.0 - (-1f64).exp()) * (-(n as f64)).exp() * coherent_population(c(0.0, -0.5), n))
        .sum();
    let closed = (1.0 - (-1f64).exp()) * (-0.25f64).exp() * (0.25 * (-1f64).exp()).exp();
    assert!((series - closed).abs() < 1e-12);
    assert!((got - closed).abs() < 1e-4, "{got} vs {closed}");
}

#[test]
fn figure1_yield_decreases_to_plateau() {
    let (model, v) = figure1();
    let report = spectral_report(&v, &model.initial_state, CONDITION_I_EPSILON).unwrap();
    assert!(report.condition_i_met);
    let plateau = report.yield_plateau_coefficient.unwrap();
    let yields: Vec<f64> = (0..=30).map(|n| survival_probability(&model.initial_state, &v, n).unwrap()).collect();
    assert_eq!(yields[0], 1.0);
    assert!(yields.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(yields[30] > 0.5);
    assert!((yields[30] / plateau - 1.0).abs() < 1e-6);
}

#[test]
fn step_probabilities_multiply_to_survival_probability() {
    let (model, v) = figure1();
    let traj = run_purification(&model.initial_state, &v, 15, None).unwrap();
    for rec in &traj.steps {
        let direct = survival_probability(&model.initial_state, &v, rec.n).unwrap();
        assert!((rec.cumulative_yield / direct - 1.0).abs() < 1e-10);
    }
}

#[test]
fn distance_to_target_shrinks_geometrically() {
    // trace distance is linear in the residual e^{NC} admixture, so it falls
    // by |e^C| per step; the fidelity deficit is quadratic and falls by |e^C|²
    let (model, v) = figure1();
    let c0 = coefficients(&model.params).unwrap();
    let target = coherent_state(c0.alpha_tilde, 30).unwrap().normalized();
    let traj = run_purification(&model.initial_state, &v, 12, Some(&target)).unwrap();
    let distances: Vec<f64> = traj.records().map(|r| r.target_distance.unwrap()).collect();
    let deficits: Vec<f64> = traj.records().map(|r| 1.0 - r.fidelity.unwrap()).collect();
    assert!(distances.windows(2).all(|w| w[1] < w[0]));
    assert!(deficits.windows(2).all(|w| w[1] < w[0]));
    let r = c0.abs_exp_c;
    let distance_ratio = distances[12] / distances[11];
    let deficit_ratio = deficits[12] / deficits[11];
    assert!((distance_ratio - r).abs() < 0.05 * r, "{distance_ratio}");
    assert!((deficit_ratio - r * r).abs() < 0.05 * r * r, "{deficit_ratio}");
}

#[test]
fn powers_approach_rank_one_projector() {
    let (model, v) = figure1();
    let report = spectral_report(&v, &model.initial_state, CONDITION_I_EPSILON).unwrap();
    let (l0, u0, v0) = (report.lambda0.unwrap(), report.u0.unwrap(), report.v0.unwrap());
    let gap = report.gap_ratio.unwrap();
    let projector = ComplexMatrix::outer(&u0, &v0).unwrap();
    let mut power = ComplexMatrix::identity(v.dim()).unwrap();
    let mut errors = Vec::new();
    for n in 1..=20u32 {
        power = power.matmul(v.matrix()).unwrap();
        let scaled = power.scale(l0.powu(n).inv());
        errors.push((n, scaled.try_sub(&projector).unwrap().frobenius_norm()));
    }
    let constant = errors[..3].iter().map(|&(n, e)| e / gap.powi(n as i32)).fold(0.0, f64::max) * 2.0;
    for &(n, e) in &errors {
        assert!(e <= constant * gap.powi(n as i32) + 1e-12, "n={n}: {e:e}");
    }
}

#[test]
fn random_initial_states_converge_together() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0;
    while checked < 10 {
        let sys = BipartiteSystem::new(2, 3, random_hermitian(&mut rng, 6)).unwrap();
        let v = build_projected_propagator(&sys, &random_probe(&mut rng, 2), 1.0).unwrap();
        let rho = random_density(&mut rng, 3);
        let sigma = random_density(&mut rng, 3);
        let report = spectral_report(&v, &rho, CONDITION_I_EPSILON).unwrap();
        let Some(gap) = report.gap_ratio.filter(|g| !report.degenerate && *g < 0.9) else {
            continue;
        };
        let n = 40;
        let a = run_purification(&rho, &v, n, None).unwrap();
        let b = run_purification(&sigma, &v, n, None).unwrap();
        if a.truncated() || b.truncated() {
            continue;
        }
        let d = a.last().state.trace_distance(&b.last().state).unwrap();
        assert!(d <= 10.0 * gap.powi(n as i32) + 1e-9, "gap {gap}: {d:e}");
        checked += 1;
    }
}

#[test]
fn yield_follows_asymptotic_law_once_purified() {
    let (model, v) = figure1();
    let report = spectral_report(&v, &model.initial_state, CONDITION_I_EPSILON).unwrap();
    let l0 = report.lambda0.unwrap().norm();
    let coef = report.yield_plateau_coefficient.unwrap();
    let traj = run_purification(&model.initial_state, &v, 30, None).unwrap();
    let start = traj.records().position(|r| r.fidelity.unwrap() > 0.999).unwrap();
    for rec in traj.records().skip(start) {
        let law = l0.powi(2 * rec.n as i32) * coef;
        assert!((rec.cumulative_yield / law - 1.0).abs() < 0.01);
    }
}

#[test]
fn orthogonal_support_is_an_extinct_branch() {
    let v = ProjectedPropagator::new(ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap(), 1.0).unwrap();
    let rho = DensityMatrix::from_populations(&[0.0, 1.0]).unwrap();
    assert!(matches!(evolve_step(&rho, &v), Err(EngineError::ExtinctBranch { .. })));
    let traj = run_purification(&rho, &v, 3, Some(&ComplexVector::basis(2, 0).unwrap())).unwrap();
    assert_eq!(traj.extinct_at, Some(1));
    assert!(traj.steps.is_empty() && traj.truncated());
}

#[test]
fn single_interval_scan_equals_single_measurement() {
    let (model, _) = figure1();
    let t = model.params.tau;
    let point = zeno_point(&model.system, &model.probe, &model.initial_state, t, 1).unwrap();
    let v = model.propagator_at(t).unwrap();
    let direct = survival_probability(&model.initial_state, &v, 1).unwrap();
    assert!((point.yield_ - direct).abs() < 1e-14);
}

#[test]
fn zeno_scan_recovers_unitarity_for_fine_schedules() {
    // the yield need not be monotone at the coarsest schedules; from n = 2 on
    // it climbs toward 1 and the defect falls
    let (model, _) = figure1();
    let ns = [2, 4, 8, 16, 32];
    let scan = zeno_limit_scan(&model.system, &model.probe, &model.initial_state, model.params.tau, &ns).unwrap();
    assert!(scan.windows(2).all(|w| w[1].yield_ > w[0].yield_));
    assert!(scan.windows(2).all(|w| w[1].unitarity_defect < w[0].unitarity_defect));
    assert!(scan.last().unwrap().yield_ > 0.8);
}

fn random_trajectory_setup(seed: u64, da: usize, db: usize, tau: f64) -> (DensityMatrix, ProjectedPropagator) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = BipartiteSystem::new(da, db, random_hermitian(&mut rng, da * db)).unwrap();
    let v = build_projected_propagator(&sys, &random_probe(&mut rng, da), tau).unwrap();
    (random_density(&mut rng, db), v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn yield_never_increases(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=4, tau in 0.0f64..4.0) {
        let (rho, v) = random_trajectory_setup(seed, da, db, tau);
        let mut prev = survival_probability(&rho, &v, 0).unwrap();
        for n in 1..=12 {
            let p = survival_probability(&rho, &v, n).unwrap();
            prop_assert!(p <= prev + 1e-12);
            prev = p;
        }
    }

    #[test]
    fn every_trajectory_state_is_a_density_matrix(
        seed in any::<u64>(), da in 1usize..=3, db in 1usize..=4, tau in 0.0f64..4.0,
    ) {
        let (rho, v) = random_trajectory_setup(seed, da, db, tau);
        let traj = run_purification(&rho, &v, 10, None).unwrap();
        let mut prev = 1.0;
        for rec in traj.records() {
            prop_assert!(is_valid_state(rec.state.matrix()));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&rec.conditional_probability));
            prop_assert!(rec.cumulative_yield <= prev + 1e-12);
            prop_assert!(rec.purity > 0.0 && rec.purity <= 1.0 + 1e-12);
            prev = rec.cumulative_yield;
        }
    }
}
