use entroprod_core::dynamics::{integrate_default, stationary_state, LindbladModel};
use entroprod_core::entanglement::{
    concurrence, negativity, ppt_min_eigenvalue, project_separable, ree_x_family, XFamilyState,
};
use entroprod_core::linalg::{
    hermitian_eig, kron, partial_trace, partial_transpose, FactorLayout, Operator, C64,
};
use entroprod_core::papermodels::{overlap_after_k, PaperModelParams};
use entroprod_core::production::gap_formula;
use entroprod_core::states::{
    gaussian_matrix, random_mixed, random_pure, relative_entropy, DensityMatrix,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hermitian(seed: u64, dim: usize) -> Operator {
    let g = gaussian_matrix(&mut ChaCha8Rng::seed_from_u64(seed), dim);
    (&g + &g.adjoint()).scale_re(0.5)
}

fn two_qubit_state(seed: u64) -> DensityMatrix {
    if seed.is_multiple_of(2) {
        random_pure(FactorLayout::two_qubits(), seed)
    } else {
        random_mixed(FactorLayout::two_qubits(), seed)
    }
}

fn random_model(seed: u64) -> LindbladModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = hermitian(seed ^ 0x5eed, 4);
    let jumps = (0..2)
        .map(|_| gaussian_matrix(&mut rng, 4).scale_re(0.5))
        .collect();
    LindbladModel::new(h, jumps, FactorLayout::two_qubits()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs_and_orthonormal(seed in any::<u64>(), dim in 1usize..9) {
        let a = hermitian(seed, dim);
        let e = hermitian_eig(&a).unwrap();
        prop_assert!(e.reconstruct().approx_eq(&a, 1e-11 * (1.0 + a.max_abs())));
        let gram = e.vectors.gram();
        prop_assert!(gram.approx_eq(&Operator::identity(dim), 1e-12));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn partial_transpose_is_involutive_and_trace_preserving(seed in any::<u64>()) {
        let layout = FactorLayout::new(vec![2, 3]).unwrap();
        let a = hermitian(seed, 6);
        for f in 0..2 {
            let pt = partial_transpose(&a, &layout, f).unwrap();
            prop_assert!((pt.trace() - a.trace()).norm() < 1e-12);
            prop_assert!(partial_transpose(&pt, &layout, f).unwrap().approx_eq(&a, 0.0));
        }
        // transposing both factors is the full transpose
        let both = partial_transpose(&partial_transpose(&a, &layout, 0).unwrap(), &layout, 1).unwrap();
        prop_assert!(both.approx_eq(&a.transpose(), 0.0));
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let a = random_mixed(FactorLayout::single(2), seed);
        let b = random_mixed(FactorLayout::single(3), seed.wrapping_add(1));
        let ab = kron(a.op(), b.op());
        let layout = FactorLayout::new(vec![2, 3]).unwrap();
        prop_assert!(partial_trace(&ab, &layout, &[0]).unwrap().approx_eq(a.op(), 1e-13));
        prop_assert!(partial_trace(&ab, &layout, &[1]).unwrap().approx_eq(b.op(), 1e-13));
    }

    #[test]
    fn relative_entropy_is_nonnegative(s1 in any::<u64>(), s2 in any::<u64>()) {
        let rho = two_qubit_state(s1);
        let sigma = random_mixed(FactorLayout::two_qubits(), s2);
        let d = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(d.is_finite() && d.value() >= -1e-12);
        prop_assert!(relative_entropy(&sigma, &sigma).unwrap().value().abs() < 1e-10);
    }

    #[test]
    fn entangled_iff_npt(seed in any::<u64>()) {
        let rho = two_qubit_state(seed);
        let c = concurrence(&rho).unwrap();
        let n = negativity(&rho).unwrap();
        prop_assert_eq!(c > 1e-7, n > 1e-7, "C = {}, N = {}", c, n);
        prop_assert!(n <= 0.5 + 1e-12 && c <= 1.0);
    }

    #[test]
    fn separable_projection_is_ppt(seed in any::<u64>()) {
        let layout = FactorLayout::two_qubits();
        let (sep, _) = project_separable(&hermitian(seed, 4), &layout, 500, 1e-10).unwrap();
        let rho = DensityMatrix::repaired(&sep, layout, 1e-8).unwrap();
        prop_assert!(ppt_min_eigenvalue(&rho).unwrap() >= -1e-7);
    }

    #[test]
    fn x_family_ree_bounds(a in 0.01f64..0.99, frac in 0.0f64..1.0, phase in 0.0f64..std::f64::consts::TAU) {
        let m = C64::from_polar(frac * (a * (1.0 - a)).sqrt(), phase);
        let x = XFamilyState::new(a, m).unwrap();
        let e = ree_x_family(&x).value();
        prop_assert!(e >= 0.0 && e <= 2f64.ln() + 1e-12);
        // the entanglement never exceeds the entropy of the populations
        prop_assert!(e <= -(a * a.ln() + (1.0 - a) * (1.0 - a).ln()) + 1e-12);
    }

    #[test]
    fn gap_nonnegative(a0sq in 0.01f64..0.99, g in 0.05f64..3.0, k in 0.05f64..3.0, t in 0.0f64..10.0) {
        let p = PaperModelParams::new(a0sq, 1.0, g, k, 0.5).unwrap();
        prop_assert!(gap_formula(&p, t).unwrap() >= -1e-12);
    }

    #[test]
    fn overlap_approaches_exponential_from_below(eta in 0.01f64..1.0, t in 0.01f64..1.0, k in 1u64..10_000) {
        let v = overlap_after_k(eta, t, k).unwrap();
        let limit = (-eta * t).exp();
        prop_assert!(v <= limit * (1.0 + 1e-14));
        prop_assert!(limit - v <= limit * (eta * t).powi(2) / k as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integration_keeps_states_physical(seed in any::<u64>()) {
        let model = random_model(seed);
        let rho0 = two_qubit_state(seed);
        let grid: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
        let traj = integrate_default(&model, &rho0, &grid).unwrap();
        for s in &traj.states {
            prop_assert!((s.op().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(s.eig().min() >= -1e-9);
        }
    }

    #[test]
    fn stationary_state_is_a_fixed_point(seed in any::<u64>()) {
        let model = random_model(seed);
        let stat = stationary_state(&model).unwrap();
        prop_assert!(!stat.non_unique);
        prop_assert!(model.apply(stat.state.op()).max_abs() < 1e-9);
    }
}
