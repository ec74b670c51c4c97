//! Cross-module invariants checked on random inputs.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use wghz_core::convert::{branch_params, fidelity, fidelity_full};
use wghz_core::pulses::{sequence_unitary, Direction, PulseParams};
use wghz_core::robustness::{closed_form_error_fidelity, direct_error_fidelity, Baseline, ErrorParam};

fn params() -> impl Strategy<Value = PulseParams<f64>> {
    (0.0..PI, -PI..PI, 0.0..TAU, -PI..PI, 0.0..TAU).prop_map(|(x, a1, p1, a2, p2)| PulseParams::new(x, a1, p1, a2, p2))
}

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::WToGhz), Just(Direction::GhzToW)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_is_bounded_and_matches_full_space(p in params(), phi in 0.0..TAU, d in direction()) {
        let f = fidelity(&p, phi, d);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity_full(&p, phi, d)).abs() < 1e-12);
    }

    #[test]
    fn sequence_is_unitary(p in params(), d in direction()) {
        prop_assert!(sequence_unitary(&p, d).unitary_deviation() < 1e-12);
    }

    #[test]
    fn common_axis_rotation_by_third_turn_is_a_symmetry(p in params(), phi in 0.0..TAU, d in direction()) {
        let s = TAU / 3.0;
        let q = PulseParams::new(p.xi, p.alpha1, p.phi1 + s, p.alpha2, p.phi2 + s);
        prop_assert!((fidelity(&p, phi, d) - fidelity(&q, phi, d)).abs() < 1e-12);
    }

    #[test]
    fn branch_law_is_optimal_everywhere(phi in 0.0..TAU, m in 0u8..3, d in direction()) {
        prop_assert!(fidelity(&branch_params(phi, d, m), phi, d) > 1.0 - 1e-12);
    }

    #[test]
    fn error_fidelity_is_phase_independent(phi in 0.0..TAU, m in 0u8..3, e in -0.2..0.2f64) {
        let b = Baseline { phi, branch: m };
        for p in ErrorParam::ALL {
            prop_assert!((direct_error_fidelity(p, e, &b) - closed_form_error_fidelity(p, e)).abs() < 1e-12);
        }
    }
}
