//! Randomized monotonicity properties, shared by the proptest suite and the
//! acceptance runner.

use gpbandit::algorithms::{PolicyConfig, PolicyKind};
use gpbandit::gp::{posterior_var_regularized, History};
use gpbandit::harness::{run_single, ExperimentConfig};
use gpbandit::rkhs::sample_objective;
use gpbandit::rng::StreamKey;
use gpbandit::{KernelSpec, Points};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 1000;

pub fn kernel() -> impl Strategy<Value = KernelSpec> {
    (0usize..4, 0.1f64..0.6).prop_map(|(k, ell)| match k {
        0 => KernelSpec::squared_exponential(ell).unwrap(),
        1 => KernelSpec::matern(0.5, ell).unwrap(),
        2 => KernelSpec::matern(1.5, ell).unwrap(),
        _ => KernelSpec::matern(2.5, ell).unwrap(),
    })
}

pub fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 2)
}

/// Up to `max` points, some of them repeated.
pub fn history(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (
        prop::collection::vec(point(), 0..=max),
        prop::collection::vec(any::<prop::sample::Index>(), 0..3),
    )
        .prop_map(|(mut xs, repeats)| {
            if !xs.is_empty() {
                for r in repeats {
                    let p = xs[r.index(xs.len())].clone();
                    xs.push(p);
                }
            }
            xs
        })
}

fn observe(spec: KernelSpec, xs: &[Vec<f64>], seed: u64) -> Result<History, TestCaseError> {
    let f = sample_objective(
        spec,
        2,
        10,
        &mut StreamKey::new(seed, 0).stream("objective"),
    );
    History::from_observations(spec, 2, xs.iter().map(|x| (x.as_slice(), f.evaluate(x))))
        .map_err(|e| TestCaseError::fail(e.to_string()))
}

/// Adding data never increases the posterior variance.
pub fn variance_decreases_with_data(
    spec: KernelSpec,
    xs: Vec<Vec<f64>>,
    extra: Vec<f64>,
    z: Vec<f64>,
) -> Result<(), TestCaseError> {
    let before = observe(spec, &xs, 0)?;
    let mut with = xs.clone();
    with.push(extra);
    let after = observe(spec, &with, 0)?;
    let v0 = before
        .posterior(&z)
        .map_err(|e| TestCaseError::fail(e.to_string()))?
        .variance();
    let v1 = after
        .posterior(&z)
        .map_err(|e| TestCaseError::fail(e.to_string()))?
        .variance();
    prop_assert!(v1 <= v0 + 1e-9, "variance grew from {v0} to {v1}");
    Ok(())
}

/// The regularized variance is non-decreasing in `lambda^2` and dominates
/// the noise-free variance.
pub fn variance_monotone_in_lambda(
    spec: KernelSpec,
    xs: Vec<Vec<f64>>,
    z: Vec<f64>,
    l1: f64,
    l2: f64,
) -> Result<(), TestCaseError> {
    let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    let pts = Points::from_rows(2, &xs);
    let v_lo = posterior_var_regularized(&spec, &pts, &z, lo);
    let v_hi = posterior_var_regularized(&spec, &pts, &z, hi);
    prop_assert!(v_lo <= v_hi + 1e-10, "{v_lo} at {lo} vs {v_hi} at {hi}");
    let exact = observe(spec, &xs, 0)?
        .posterior(&z)
        .map_err(|e| TestCaseError::fail(e.to_string()))?
        .variance();
    prop_assert!(
        exact <= v_lo + 1e-9,
        "noise-free {exact} above regularized {v_lo}"
    );
    Ok(())
}

/// The posterior interpolates every observation.
pub fn interpolation_is_exact(
    spec: KernelSpec,
    xs: Vec<Vec<f64>>,
    seed: u64,
) -> Result<(), TestCaseError> {
    let h = observe(spec, &xs, seed)?;
    for (x, &y) in xs.iter().zip(h.values()) {
        let s = h
            .posterior(x)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(
            (s.mean - y).abs() <= 1e-6,
            "mean {} at an observation of {y}",
            s.mean
        );
        prop_assert!(
            s.variance() <= 1e-8,
            "variance {} at an observation",
            s.variance()
        );
    }
    Ok(())
}

pub fn run_config() -> impl Strategy<Value = (ExperimentConfig, u64)> {
    (
        0usize..4,
        3usize..8,
        1usize..25,
        any::<u64>(),
        0u64..1000,
        prop::sample::select(vec![
            PolicyKind::Ucb,
            PolicyKind::Ei,
            PolicyKind::Mvr,
            PolicyKind::Pe,
            PolicyKind::Uniform,
        ]),
    )
        .prop_map(|(k, grid, horizon, master_seed, seed, policy)| {
            let kernel = match k {
                0 => KernelSpec::squared_exponential(0.25).unwrap(),
                1 => KernelSpec::matern(0.5, 0.25).unwrap(),
                2 => KernelSpec::matern(1.5, 0.25).unwrap(),
                _ => KernelSpec::matern(2.5, 0.25).unwrap(),
            };
            let config = ExperimentConfig {
                kernel,
                grid_resolution: grid,
                horizon,
                num_seeds: 1,
                master_seed,
                policies: vec![PolicyConfig::new(policy)],
                objective_size: 10,
                ..Default::default()
            };
            (config, seed)
        })
}

/// `R_t` is non-decreasing, `r_t` non-increasing and non-negative, and both
/// follow their defining identities exactly.
pub fn regret_is_monotone(config: ExperimentConfig, seed: u64) -> Result<(), TestCaseError> {
    let tr = run_single(&config, &config.policies[0], seed)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(tr.steps.len(), config.horizon);
    let mut sum = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (i, s) in tr.steps.iter().enumerate() {
        sum += s.inst_regret;
        best = best.max(s.f_value);
        prop_assert_eq!(s.cum_regret, sum);
        prop_assert_eq!(s.simple_regret, tr.f_star - best);
        prop_assert!(s.simple_regret >= 0.0 && s.cum_regret >= 0.0);
        if i > 0 {
            let prev = &tr.steps[i - 1];
            prop_assert!(s.cum_regret >= prev.cum_regret);
            prop_assert!(s.simple_regret <= prev.simple_regret);
        }
    }
    Ok(())
}
