//! Dense-matrix oracles built on nalgebra, independent of the library's
//! Cholesky code.

#![allow(dead_code)]

pub mod props;

use gpbandit::gp::{DEDUP_THRESHOLD, JITTER};
use gpbandit::{KernelSpec, Points};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn all_kernels() -> Vec<KernelSpec> {
    vec![
        KernelSpec::squared_exponential(0.25).unwrap(),
        KernelSpec::matern(0.5, 0.25).unwrap(),
        KernelSpec::matern(1.5, 0.25).unwrap(),
        KernelSpec::matern(2.5, 0.25).unwrap(),
    ]
}

pub fn gram(spec: &KernelSpec, xs: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), xs.len(), |i, j| spec.eval(&xs[i], &xs[j]))
}

pub fn cross(spec: &KernelSpec, xs: &[Vec<f64>], x: &[f64]) -> DVector<f64> {
    DVector::from_fn(xs.len(), |i, _| spec.eval(&xs[i], x))
}

fn raw_posterior(spec: &KernelSpec, xs: &[Vec<f64>], ys: &[f64], x: &[f64]) -> (f64, f64) {
    let prior = spec.eval(x, x);
    if xs.is_empty() {
        return (0.0, prior);
    }
    let mut k = gram(spec, xs);
    for i in 0..xs.len() {
        k[(i, i)] += JITTER;
    }
    let inv = k.try_inverse().expect("jittered Gram matrix is invertible");
    let kx = cross(spec, xs, x);
    let w = &inv * &kx;
    let mean = w.dot(&DVector::from_column_slice(ys));
    (mean, prior - kx.dot(&w))
}

/// Noise-free posterior `(mean, variance)` on the effective set, with the
/// same admission threshold and jitter as the library, via a dense inverse.
pub fn posterior(spec: &KernelSpec, xs: &[Vec<f64>], ys: &[f64], x: &[f64]) -> (f64, f64) {
    let mut ex: Vec<Vec<f64>> = Vec::new();
    let mut ey: Vec<f64> = Vec::new();
    for (xi, &yi) in xs.iter().zip(ys) {
        let (_, v) = raw_posterior(spec, &ex, &ey, xi);
        if v > DEDUP_THRESHOLD {
            ex.push(xi.clone());
            ey.push(yi);
        }
    }
    let (m, v) = raw_posterior(spec, &ex, &ey, x);
    (m, v.clamp(0.0, spec.variance()))
}

/// `k(x,x) - k^T (K + lambda_sq I)^{-1} k` over the raw sequence.
pub fn var_regularized(spec: &KernelSpec, xs: &[Vec<f64>], x: &[f64], lambda_sq: f64) -> f64 {
    let prior = spec.eval(x, x);
    if xs.is_empty() {
        return prior;
    }
    let k = gram(spec, xs) + DMatrix::identity(xs.len(), xs.len()) * lambda_sq;
    let kx = cross(spec, xs, x);
    prior - kx.dot(&(k.try_inverse().unwrap() * &kx))
}

/// `1/2 sum ln(1 + eig / lambda_sq)` from a symmetric eigendecomposition.
pub fn information_gain(spec: &KernelSpec, xs: &[Vec<f64>], lambda_sq: f64) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let eig = gram(spec, xs).symmetric_eigenvalues();
    eig.iter()
        .map(|e| 0.5 * (1.0 + e.max(0.0) / lambda_sq).ln())
        .sum()
}

pub fn to_points(dim: usize, xs: &[Vec<f64>]) -> Points {
    Points::from_rows(dim, xs)
}

/// A random history of at most `max_len` points in `[0,1]^dim` observed
/// through `f`, where roughly one point in five repeats an earlier one.
pub fn random_history<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_len: usize,
    f: impl Fn(&[f64]) -> f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(0..=max_len);
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        if !xs.is_empty() && rng.random_bool(0.2) {
            let j = rng.random_range(0..xs.len());
            xs.push(xs[j].clone());
            ys.push(ys[j]);
        } else {
            let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            ys.push(f(&x));
            xs.push(x);
        }
    }
    (xs, ys)
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

/// Largest absolute errors `(mean, variance, regularized variance)` of the
/// library against the dense oracles over `cases` random instances of at
/// most 12 observations of a sampled objective.
pub fn posterior_errors(spec: KernelSpec, stream: u64, cases: usize) -> [f64; 3] {
    use gpbandit::gp::{posterior_var_regularized, History};
    use gpbandit::rng::StreamKey;

    let mut rng = StreamKey::new(2024, stream).stream("posterior-oracle");
    let mut worst = [0.0f64; 3];
    for _ in 0..cases {
        let dim = 2;
        let f = gpbandit::rkhs::sample_objective(spec, dim, 20, &mut rng);
        let (xs, ys) = random_history(&mut rng, dim, 12, |x| f.evaluate(x));
        let x = if !xs.is_empty() && rng.random_bool(0.25) {
            xs[rng.random_range(0..xs.len())].clone()
        } else {
            random_point(&mut rng, dim)
        };
        let history = History::from_observations(
            spec,
            dim,
            xs.iter().map(|p| p.as_slice()).zip(ys.iter().copied()),
        )
        .unwrap();
        let got = history.posterior(&x).unwrap();
        let (mean, var) = posterior(&spec, &xs, &ys, &x);
        let lambda_sq = 10f64.powf(rng.random_range(-3.0..0.5));
        let reg = posterior_var_regularized(&spec, &to_points(dim, &xs), &x, lambda_sq);
        let errs = [
            (got.mean - mean).abs(),
            (got.variance() - var).abs(),
            (reg - var_regularized(&spec, &xs, &x, lambda_sq)).abs(),
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }
    worst
}
