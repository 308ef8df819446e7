//! Property tests for the gate kernels and transform compilers.

use num_complex::Complex64;
use proptest::prelude::*;

use fmft_core::fock::{binomial, SectorBasis, StateVector};
use fmft_core::transforms::{
    apply_sequence, fmft_sequence, invert_sequence, mft_fold_compile, single_body_action, Gate,
    GateSequence,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A random normalized state over the (n, m) sector.
fn state_from_parts(n: usize, m: usize, parts: &[(f64, f64)]) -> StateVector {
    let basis = SectorBasis::enumerate(n, m).unwrap();
    let mut amps: Vec<Complex64> = parts.iter().map(|&(re, im)| c(re, im)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in &mut amps {
            *a /= norm;
        }
    } else {
        amps[0] = c(1.0, 0.0);
    }
    StateVector::from_amplitudes(basis, amps).unwrap()
}

fn sector_strategy() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=8).prop_flat_map(|n| (Just(n), 0usize..=n))
}

fn amplitudes_for(n: usize, m: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    let dim = binomial(n, m) as usize;
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
}

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let sites: Vec<usize> = (1..=n).collect();
    prop_oneof![
        (1..=n, -6.3..6.3f64).prop_map(|(site, phi)| Gate::Phase { site, phi }),
        (1..n, -6.3..6.3f64).prop_flat_map(move |(x, theta)| {
            ((x + 1)..=n).prop_map(move |y| Gate::Givens { x, y, theta })
        }),
        Just(sites).prop_shuffle().prop_map(|perm| Gate::Permute { perm }),
    ]
}

fn sequence_strategy() -> impl Strategy<Value = (usize, usize, Vec<(f64, f64)>, GateSequence)> {
    sector_strategy().prop_flat_map(|(n, m)| {
        (
            Just(n),
            Just(m),
            amplitudes_for(n, m),
            proptest::collection::vec(gate_strategy(n), 0..12)
                .prop_map(move |gates| GateSequence::new(n, gates).unwrap()),
        )
    })
}

fn max_amp_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Every gate preserves the norm and composes with its own adjoint to
    /// the identity.
    #[test]
    fn gates_are_unitary((n, m, parts, seq) in sequence_strategy()) {
        let mut v = state_from_parts(n, m, &parts);
        let orig = v.clone();
        apply_sequence(&mut v, &seq).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12, "norm drifted to {}", v.norm());
        apply_sequence(&mut v, &invert_sequence(&seq)).unwrap();
        prop_assert!(max_amp_diff(&v, &orig) < 1e-12);
    }

    /// The double inverse is the original sequence, structurally.
    #[test]
    fn invert_is_involutive((_, _, _, seq) in sequence_strategy()) {
        prop_assert_eq!(invert_sequence(&invert_sequence(&seq)), seq);
    }

    /// Translation around the full ring is the identity, signs included.
    #[test]
    fn translation_order_n((n, m, parts) in sector_strategy()
        .prop_flat_map(|(n, m)| (Just(n), Just(m), amplitudes_for(n, m))))
    {
        let mut v = state_from_parts(n, m, &parts);
        let orig = v.clone();
        for _ in 0..n {
            v.translate();
        }
        prop_assert!(max_amp_diff(&v, &orig) < 1e-12);
    }

    /// The vacuum is an exact fixed point of every sequence.
    #[test]
    fn vacuum_fixed_point((n, seq) in (2usize..=8).prop_flat_map(|n| (
        Just(n),
        proptest::collection::vec(gate_strategy(n), 0..12)
            .prop_map(move |gates| GateSequence::new(n, gates).unwrap()),
    ))) {
        let basis = SectorBasis::enumerate(n, 0).unwrap();
        let mut v = StateVector::basis_state(basis, 0).unwrap();
        apply_sequence(&mut v, &seq).unwrap();
        prop_assert_eq!(v.amplitude(0), c(1.0, 0.0));
    }

    /// The butterfly network round-trips random states through its
    /// adjoint-reversed inverse.
    #[test]
    fn butterfly_round_trip((n, m, parts) in prop_oneof![Just(4usize), Just(8)]
        .prop_flat_map(|n| (Just(n), 1..=3usize))
        .prop_flat_map(|(n, m)| (Just(n), Just(m), amplitudes_for(n, m))))
    {
        let seq = fmft_sequence(n).unwrap();
        let mut v = state_from_parts(n, m, &parts);
        let orig = v.clone();
        apply_sequence(&mut v, &seq).unwrap();
        apply_sequence(&mut v, &invert_sequence(&seq)).unwrap();
        prop_assert!(max_amp_diff(&v, &orig) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Folding reconstructs arbitrary unitaries assembled from random
    /// gate circuits, through the single-body action.
    #[test]
    fn fold_compile_reconstructs_random_unitaries((n, seq) in (2usize..=6)
        .prop_flat_map(|n| (
            Just(n),
            proptest::collection::vec(gate_strategy(n), 1..10)
                .prop_map(move |gates| GateSequence::new(n, gates).unwrap()),
        )))
    {
        let target = single_body_action(&seq).unwrap();
        // Compilation verifies its own reconstruction to 1e-10 and fails
        // loudly otherwise.
        let compiled = mft_fold_compile(&target).unwrap();
        let realized = single_body_action(&compiled).unwrap();
        let dev = realized.matrix().max_abs_diff(target.matrix());
        prop_assert!(dev < 1e-10, "reconstruction off by {dev:e}");
        let counts = compiled.gate_counts();
        prop_assert!(counts.givens <= n * (n - 1) / 2);
        prop_assert!(counts.permute == 0);
    }
}
