//! Randomized property tests for structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use twinsub::fock::{ModeCutoff, State, TwoModePureState};
use twinsub::optics::{beam_splitter_unitary, BeamSplitterSpec};
use twinsub::subtraction::{bucket_subtract, coherent_subtract, HeraldSign};
use twinsub::sweep::format_float;

fn random_pure(cutoff: ModeCutoff, seeds: &[(f64, f64)]) -> Option<TwoModePureState> {
    let dim = cutoff.dim();
    let amps: Vec<Complex64> = (0..dim)
        .map(|i| {
            let (re, im) = seeds[i % seeds.len()];
            Complex64::new(re + 0.1 * i as f64, im - 0.05 * i as f64)
        })
        .collect();
    TwoModePureState::normalized(cutoff, amps).ok()
}

proptest! {
    #[test]
    fn float_format_roundtrips(v in prop::num::f64::ANY) {
        let text = format_float(v);
        if v.is_nan() {
            prop_assert_eq!(text, "nan");
        } else if v.is_infinite() {
            prop_assert!(text == "inf" || text == "-inf");
        } else {
            let back: f64 = text.parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn beam_splitter_preserves_norm(
        theta in -3.2f64..3.2,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
    ) {
        let cutoff = ModeCutoff::new(4);
        let psi = random_pure(cutoff, &[(re, im), (im, re)]).unwrap();
        let u = beam_splitter_unitary(BeamSplitterSpec::new(theta), cutoff);
        let out = u.apply_vec(psi.amplitudes());
        let norm_sq: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm_sq - 1.0).abs() < 1e-10);
    }

    #[test]
    fn herald_probability_is_theta_sq_scaled(
        n in 1usize..8,
        theta in 0.001f64..0.1,
    ) {
        let twin = twinsub::catalog::build(
            &twinsub::catalog::InputStateSpec::TwinFock { n },
        ).unwrap();
        let bucket = bucket_subtract(&twin, theta).unwrap();
        let expected = 2.0 * n as f64 * theta * theta;
        prop_assert!((bucket.herald_probability - expected).abs() < 1e-12 * expected.max(1.0));
    }

    #[test]
    fn coherent_signs_split_bucket_probability(
        n in 1usize..8,
        theta in 0.001f64..0.1,
    ) {
        let twin = twinsub::catalog::build(
            &twinsub::catalog::InputStateSpec::TwinFock { n },
        ).unwrap();
        let bucket = bucket_subtract(&twin, theta).unwrap();
        let plus = coherent_subtract(&twin, theta, HeraldSign::Plus).unwrap();
        let minus = coherent_subtract(&twin, theta, HeraldSign::Minus).unwrap();
        let total = plus.herald_probability + minus.herald_probability;
        prop_assert!((total - bucket.herald_probability).abs() < 1e-14);
        prop_assert!((plus.state.purity() - 1.0).abs() < 1e-10);
        prop_assert!((minus.state.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mixed_route_matches_pure_route(
        n in 1usize..6,
        theta in 0.005f64..0.1,
    ) {
        let twin = twinsub::catalog::build(
            &twinsub::catalog::InputStateSpec::TwinFock { n },
        ).unwrap();
        let pure_out = coherent_subtract(&twin, theta, HeraldSign::Plus).unwrap();
        let mixed_in = State::Mixed(twin.to_density());
        let mixed_out = coherent_subtract(&mixed_in, theta, HeraldSign::Plus).unwrap();
        let dist = twinsub::fock::trace_distance(
            &pure_out.state.to_density(),
            &mixed_out.state.to_density(),
        ).unwrap();
        prop_assert!(dist < 1e-10);
        prop_assert!(
            (pure_out.herald_probability - mixed_out.herald_probability).abs() < 1e-14
        );
    }
}
