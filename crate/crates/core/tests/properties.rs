mod common;

use common::props::{self, CASES};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn variance_decreases_with_data(
        spec in props::kernel(),
        xs in props::history(10),
        extra in props::point(),
        z in props::point(),
    ) {
        props::variance_decreases_with_data(spec, xs, extra, z)?;
    }

    #[test]
    fn variance_monotone_in_lambda(
        spec in props::kernel(),
        xs in props::history(10),
        z in props::point(),
        l1 in 1e-4f64..4.0,
        l2 in 1e-4f64..4.0,
    ) {
        props::variance_monotone_in_lambda(spec, xs, z, l1, l2)?;
    }

    #[test]
    fn interpolation_is_exact(spec in props::kernel(), xs in props::history(10), seed in 0u64..1000) {
        props::interpolation_is_exact(spec, xs, seed)?;
    }

    #[test]
    fn regret_is_monotone((config, seed) in props::run_config()) {
        props::regret_is_monotone(config, seed)?;
    }
}
