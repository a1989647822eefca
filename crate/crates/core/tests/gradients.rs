mod common;

use hqf_core::model::Variant;

#[test]
fn shift_rule_matches_finite_differences_and_direct_route() {
    for seed in 0..10 {
        let (fd, direct) = common::circuit_gradient_errors(seed);
        assert!(fd < 1e-6, "seed {seed}: shift vs fd {fd:e}");
        assert!(direct < 1e-9, "seed {seed}: shift vs direct {direct:e}");
    }
}

#[test]
fn gru_backward_matches_finite_differences() {
    for seed in 0..5 {
        let e = common::gru_gradient_error(seed);
        assert!(e < 1e-5, "seed {seed}: {e:e}");
    }
}

#[test]
fn lstm_backward_matches_finite_differences() {
    for seed in 0..5 {
        let e = common::lstm_gradient_error(seed);
        assert!(e < 1e-5, "seed {seed}: {e:e}");
    }
}

#[test]
fn linear_backward_matches_finite_differences() {
    for seed in 0..5 {
        let e = common::linear_gradient_error(seed);
        assert!(e < 1e-7, "seed {seed}: {e:e}");
    }
}

#[test]
fn end_to_end_gradients_match_finite_differences() {
    for variant in Variant::ALL {
        for seed in 0..3 {
            let e = common::model_gradient_error(variant, seed);
            assert!(e < 1e-4, "{variant} seed {seed}: {e:e}");
        }
    }
}
