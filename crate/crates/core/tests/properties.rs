use proptest::prelude::*;
use spinwigner::models::{
    build_hamiltonian, ground_state, spin_parity_operator, staggered_flip_operator, total_sz,
    z_rotation, Couplings, GroundStatePolicy, ModelSpec,
};
use spinwigner::qcore::{herm_eig, partial_trace, random_pure_state, HermitianOperator};
use spinwigner::wigner::{
    equal_angle_point, kernel_multi, kernel_single, werner, wigner_value, PhasePoint,
    KERNEL_EIGENVALUES,
};
use spinwigner::{CorrelationLabel, DensityMatrix};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point() -> impl Strategy<Value = PhasePoint> {
    (0.0..=std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
        .prop_map(|(t, p)| PhasePoint::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_has_fixed_spectrum_and_unit_trace(p in point()) {
        let k = kernel_single(&p);
        prop_assert!((k.trace() - 1.0).abs() < 1e-12);
        let ev = herm_eig(&k).values;
        prop_assert!((ev[0] - KERNEL_EIGENVALUES[1]).abs() < 1e-12);
        prop_assert!((ev[1] - KERNEL_EIGENVALUES[0]).abs() < 1e-12);
    }

    #[test]
    fn multi_kernel_trace_is_one(a in point(), b in point(), c in point()) {
        prop_assert!((kernel_multi(&[a, b, c], 3).unwrap().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_points_commute_with_site_swap(p in point()) {
        let k = kernel_multi(&[p, p], 2).unwrap();
        // SWAP exchanges basis states 1 and 2
        let mut swapped = k.matrix().clone();
        swapped.swap_rows(1, 2);
        swapped.swap_columns(1, 2);
        prop_assert!(spinwigner::qcore::max_abs(&(swapped - k.matrix())) < 1e-15);
    }

    #[test]
    fn parity_and_magnetization_symmetries(lambda in 0.0..3.0f64, gamma in 0.0..=1.0f64, j in -2.0..2.0f64, delta in -3.0..3.0f64, phi in 0.0..6.28f64) {
        let n = 6;
        let p = spin_parity_operator(n);
        prop_assert!(build_hamiltonian(&ModelSpec::ti(n, lambda)).unwrap().commutator_norm(&p) < 1e-11);
        prop_assert!(build_hamiltonian(&ModelSpec::xy(n, lambda, gamma)).unwrap().commutator_norm(&p) < 1e-11);
        let xxz = build_hamiltonian(&ModelSpec { sites: n, couplings: Couplings::Xxz { j, delta } }).unwrap();
        prop_assert!(xxz.commutator_norm(&total_sz(n)) < 1e-11);
        prop_assert!(xxz.conjugate_by(&z_rotation(n, phi)).distance(&xxz) < 1e-11);
        let flipped = build_hamiltonian(&ModelSpec { sites: n, couplings: Couplings::Xxz { j: -j, delta: -delta } }).unwrap();
        prop_assert!(xxz.conjugate_by(staggered_flip_operator(n).unwrap().matrix()).distance(&flipped) < 1e-11);
    }

    #[test]
    fn hamiltonians_are_real_symmetric(lambda in -2.0..2.0f64, gamma in -1.0..=1.0f64, n in 2usize..=5) {
        let h = build_hamiltonian(&ModelSpec::xy(n, lambda, gamma)).unwrap();
        prop_assert!(h.matrix().iter().all(|z| z.im == 0.0));
        prop_assert!(HermitianOperator::new(h.matrix().clone()).is_ok());
        prop_assert!(h.matrix() == &h.matrix().transpose());
    }

    #[test]
    fn werner_sign_marks_entanglement(x in 0.0..=1.0f64, p in point()) {
        let w = equal_angle_point(&werner(x).unwrap(), &CorrelationLabel::total(2), &p).unwrap();
        prop_assert!((w - (1.0 - 3.0 * x) / 4.0).abs() < 1e-14);
        if (x - 1.0 / 3.0).abs() > 1e-12 {
            prop_assert_eq!(w < 0.0, x > 1.0 / 3.0);
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_values(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::from_pure(&random_pure_state(4, &mut rng)).unwrap();
        let label = CorrelationLabel::new(vec![1, 3], 4).unwrap();
        let reduced = partial_trace(&rho, &label).unwrap();
        prop_assert!((reduced.trace() - 1.0).abs() < 1e-12);
        let direct = equal_angle_point(&rho, &label, &p).unwrap();
        prop_assert!((direct - wigner_value(&reduced, &[p, p]).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn ground_state_slices_are_translation_invariant(lambda in 0.0..2.0f64, delta in -0.9..5.0f64, p in point()) {
        let pair = |a, b| CorrelationLabel::new(vec![a, b], 6).unwrap();
        for spec in [ModelSpec::ti(6, lambda), ModelSpec::xy(6, lambda, 0.5), ModelSpec::xxz(6, delta)] {
            let gs = ground_state(&spec, GroundStatePolicy::Symmetric, None).unwrap();
            let a = equal_angle_point(&gs.state, &pair(1, 2), &p).unwrap();
            let b = equal_angle_point(&gs.state, &pair(2, 3), &p).unwrap();
            let c = equal_angle_point(&gs.state, &pair(1, 6), &p).unwrap();
            prop_assert!((a - b).abs() < 1e-10, "{:?}: {} vs {}", spec, a, b);
            prop_assert!((a - c).abs() < 1e-10);
        }
    }
}

#[test]
fn label_size_monotonicity_at_zero_coupling() {
    let gs = ground_state(&ModelSpec::ti(6, 0.0), GroundStatePolicy::Symmetric, None).unwrap();
    let a = (1.0 + 3f64.sqrt()) / 2.0;
    let mut previous = 0.0;
    for k in 1..=6 {
        let label = CorrelationLabel::new((1..=k).collect(), 6).unwrap();
        let v = equal_angle_point(&gs.state, &label, &PhasePoint::NORTH).unwrap();
        assert!((v - a.powi(k as i32)).abs() < 1e-12);
        assert!(v > previous);
        previous = v;
    }
}

#[test]
fn marginal_chain_normalizes() {
    // integrating every site out of a Wigner function leaves Tr ρ
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [2, 3] {
        let rho = DensityMatrix::from_pure(&random_pure_state(n, &mut rng)).unwrap();
        let mut current = rho.clone();
        for keep in (1..n).rev() {
            let label = CorrelationLabel::new((1..=keep).collect(), keep + 1).unwrap();
            let pts: Vec<PhasePoint> = (0..keep).map(|_| PhasePoint::random(&mut rng)).collect();
            let by_quadrature = spinwigner::acceptance::quadrature_marginal(&current, &pts).unwrap();
            current = partial_trace(&current, &label).unwrap();
            assert!((by_quadrature - wigner_value(&current, &pts).unwrap()).abs() < 1e-8);
        }
        // last site: (1/2π)∫ sinθ W dθ dφ = Tr ρ₁ = 1
        let total = spinwigner::acceptance::quadrature_marginal(&current, &[]).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
    }
}
