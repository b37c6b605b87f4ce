mod common;

use gpbandit::gp::{realized_information_gain, SequenceGram};
use gpbandit::rkhs::RkhsFunction;
use gpbandit::rng::StreamKey;
use gpbandit::theory_checks::elliptical_count;
use gpbandit::{KernelSpec, Points};
use rand::Rng;

const TOL: f64 = 1e-8;

#[test]
fn posterior_matches_dense_inverse() {
    for (k, spec) in common::all_kernels().into_iter().enumerate() {
        let [mean, var, reg] = common::posterior_errors(spec, k as u64, 200);
        assert!(
            mean < TOL && var < TOL && reg < TOL,
            "{spec}: {mean:e} {var:e} {reg:e}"
        );
    }
}

#[test]
fn information_gain_matches_eigenvalues() {
    let spec = KernelSpec::squared_exponential(0.25).unwrap();
    let pts = Points::from_rows(
        2,
        [
            [0.1, 0.1],
            [0.9, 0.2],
            [0.5, 0.5],
            [0.2, 0.8],
            [0.8, 0.8],
            [0.5, 0.1],
            [0.1, 0.5],
            [0.9, 0.6],
        ],
    );
    let xs: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
    for lambda_sq in [0.01, 0.1, 1.0] {
        let got = realized_information_gain(&spec, &pts, lambda_sq);
        let want = common::information_gain(&spec, &xs, lambda_sq);
        assert!(
            (got - want).abs() < 1e-10,
            "lambda^2 = {lambda_sq}: {got} vs {want}"
        );
    }
}

#[test]
fn gains_and_pivots_match_oracles_on_random_sequences() {
    let mut rng = StreamKey::new(5, 0).stream("gain-oracle");
    for spec in common::all_kernels() {
        for _ in 0..20 {
            let (xs, _) = common::random_history(&mut rng, 2, 30, |_| 0.0);
            if xs.is_empty() {
                continue;
            }
            let pts = common::to_points(2, &xs);
            let lambda = 10f64.powf(rng.random_range(-2.0..0.0));
            let lambda_sq = lambda * lambda;
            let gain = realized_information_gain(&spec, &pts, lambda_sq);
            let want = common::information_gain(&spec, &xs, lambda_sq);
            assert!((gain - want).abs() < 1e-8 * want.max(1.0));

            let vars = SequenceGram::new(&spec, &pts).regularized_variances(xs.len(), lambda_sq);
            let mut count = 0;
            for (t, v) in vars.iter().enumerate() {
                let oracle = common::var_regularized(&spec, &xs[..t], &xs[t], lambda_sq);
                assert!((v - oracle).abs() < TOL);
                if oracle.sqrt() > lambda {
                    count += 1;
                }
            }
            let c = elliptical_count(&spec, &pts, lambda).unwrap();
            assert_eq!(c.count, count);
        }
    }
}

#[test]
fn rkhs_norm_matches_dense_quadratic_form() {
    let mut rng = StreamKey::new(9, 0).stream("norm-oracle");
    for spec in common::all_kernels() {
        let f = gpbandit::rkhs::sample_objective(spec, 2, 40, &mut rng);
        let xs: Vec<Vec<f64>> = f.centers().iter().map(|p| p.to_vec()).collect();
        let c = nalgebra::DVector::from_column_slice(f.coefficients());
        let q = c.dot(&(common::gram(&spec, &xs) * &c));
        approx::assert_relative_eq!(f.norm(), q.sqrt(), max_relative = 1e-12);
        let rebuilt =
            RkhsFunction::new(spec, f.centers().clone(), f.coefficients().to_vec()).unwrap();
        assert_eq!(rebuilt.norm(), f.norm());
    }
}
