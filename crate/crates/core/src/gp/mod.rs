//! Noise-free Gaussian-process posterior over a growing query history.
//!
//! The posterior conditions on the *effective set*: the queries that were
//! not fully correlated with earlier ones at insertion time. A query joins
//! the effective set iff its posterior variance exceeds [`DEDUP_THRESHOLD`];
//! the Gram factor of the effective set grows by bordered Cholesky updates
//! and is rebuilt from scratch every [`REFACTOR_INTERVAL`] insertions.

mod candidates;
mod sequence;

pub use candidates::CandidatePosterior;
pub use sequence::{realized_information_gain, sequential_std, SequenceGram};

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, kernel_vector, KernelSpec};
use crate::linalg::{dot, CholeskyFactor};
use crate::points::Points;

/// A query joins the effective set only if its posterior variance exceeds this.
pub const DEDUP_THRESHOLD: f64 = 1e-10;
/// Diagonal jitter added to the effective-set Gram matrix before factorization.
pub const JITTER: f64 = 1e-12;
/// Raw posterior variances below this are reported as conditioning failures.
pub const NEGATIVE_VARIANCE_LIMIT: f64 = -1e-6;
/// Number of effective-set insertions between full refactorizations.
pub const REFACTOR_INTERVAL: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub std: f64,
}

impl PosteriorSummary {
    pub fn variance(&self) -> f64 {
        self.std * self.std
    }
}

/// Clamps a raw variance into `[0, prior]`, rejecting values that are too
/// negative to be roundoff.
pub(crate) fn clamp_variance(raw: f64, prior: f64) -> Result<f64> {
    if raw < NEGATIVE_VARIANCE_LIMIT || raw.is_nan() {
        return Err(Error::NegativeVariance { variance: raw });
    }
    Ok(raw.clamp(0.0, prior))
}

/// Query sequence, observed values, effective set and its Cholesky factor.
#[derive(Debug, Clone)]
pub struct History {
    spec: KernelSpec,
    queries: Points,
    values: Vec<f64>,
    effective: Vec<usize>,
    effective_points: Points,
    chol: CholeskyFactor,
    // L^{-1} f(E)
    whitened: Vec<f64>,
    since_refactor: usize,
    epoch: u64,
}

/// Outcome of adding one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// The query joined the effective set.
    Inserted,
    /// The query was fully correlated with the effective set (or its pivot
    /// could not be factorized) and only the raw sequence grew.
    Correlated,
}

impl History {
    pub fn new(spec: KernelSpec, dim: usize) -> Self {
        History {
            spec,
            queries: Points::new(dim),
            values: Vec::new(),
            effective: Vec::new(),
            effective_points: Points::new(dim),
            chol: CholeskyFactor::new(),
            whitened: Vec::new(),
            since_refactor: 0,
            epoch: 0,
        }
    }

    /// Replays `(x, y)` pairs through [`History::extend`].
    pub fn from_observations<'a>(
        spec: KernelSpec,
        dim: usize,
        observations: impl IntoIterator<Item = (&'a [f64], f64)>,
    ) -> Result<Self> {
        let mut history = History::new(spec, dim);
        for (x, y) in observations {
            history.extend(x, y)?;
        }
        Ok(history)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.queries.dim()
    }

    /// Length `t` of the raw query sequence.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn queries(&self) -> &Points {
        &self.queries
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Positions in the raw sequence that form the effective set, in order.
    pub fn effective_indices(&self) -> &[usize] {
        &self.effective
    }

    pub fn effective_points(&self) -> &Points {
        &self.effective_points
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.chol
    }

    pub(crate) fn whitened(&self) -> &[f64] {
        &self.whitened
    }

    /// Incremented on every full refactorization.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Largest observed value, if any.
    pub fn best_value(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    /// `K(E, E)^{-1} f(E)`.
    pub fn alpha(&self) -> Vec<f64> {
        let mut a = self.whitened.clone();
        self.chol.backward_solve_in_place(&mut a);
        a
    }

    /// `L^{-1} k(E, x)`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut v = kernel_vector(&self.spec, &self.effective_points, x);
        self.chol.forward_solve_in_place(&mut v);
        v
    }

    /// Noise-free posterior mean and standard deviation at `x`.
    pub fn posterior(&self, x: &[f64]) -> Result<PosteriorSummary> {
        assert_eq!(x.len(), self.dim(), "query dimension mismatch");
        let prior = self.spec.eval(x, x);
        if self.effective.is_empty() {
            return Ok(PosteriorSummary {
                mean: 0.0,
                std: prior.sqrt(),
            });
        }
        let v = self.project(x);
        let variance = clamp_variance(prior - dot(&v, &v), prior)?;
        Ok(PosteriorSummary {
            mean: dot(&v, &self.whitened),
            std: variance.sqrt(),
        })
    }

    /// Appends `(x, y)` and grows the effective set when `x` carries new
    /// information.
    pub fn extend(&mut self, x: &[f64], y: f64) -> Result<Extension> {
        assert_eq!(x.len(), self.dim(), "query dimension mismatch");
        let prior = self.spec.eval(x, x);
        let l = self.project(x);
        let raw = prior - dot(&l, &l);
        clamp_variance(raw, prior)?;
        self.extend_projected(x, y, &l, raw)
    }

    /// [`History::extend`] with `l = L^{-1} k(E, x)` and the raw posterior
    /// variance already known.
    pub(crate) fn extend_projected(
        &mut self,
        x: &[f64],
        y: f64,
        l: &[f64],
        raw_variance: f64,
    ) -> Result<Extension> {
        self.queries.push(x);
        self.values.push(y);
        if raw_variance <= DEDUP_THRESHOLD {
            return Ok(Extension::Correlated);
        }
        if self.chol.push_row(l, raw_variance + JITTER).is_err() {
            return Ok(Extension::Correlated);
        }
        let d = self.chol.diag(self.chol.dim() - 1);
        self.whitened.push((y - dot(l, &self.whitened)) / d);
        self.effective.push(self.values.len() - 1);
        self.effective_points.push(x);
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_INTERVAL {
            self.refactor()?;
        }
        Ok(Extension::Inserted)
    }

    /// Rebuilds the Cholesky factor and whitened values from `K(E, E)`.
    pub fn refactor(&mut self) -> Result<()> {
        let pts = &self.effective_points;
        let spec = self.spec;
        self.chol = CholeskyFactor::factorize(pts.len(), |i, j| {
            let k = spec.eval(pts.get(i), pts.get(j));
            if i == j {
                k + JITTER
            } else {
                k
            }
        })?;
        let f_e: Vec<f64> = self.effective.iter().map(|&i| self.values[i]).collect();
        self.whitened = self.chol.forward_solve(&f_e);
        self.since_refactor = 0;
        self.epoch += 1;
        Ok(())
    }

    /// Posterior variance of the regularized model with variance parameter
    /// `lambda_sq`, conditioned on the full raw query sequence (duplicates
    /// included).
    pub fn posterior_var_regularized(&self, x: &[f64], lambda_sq: f64) -> f64 {
        posterior_var_regularized(&self.spec, &self.queries, x, lambda_sq)
    }
}

/// `k(x,x) - k(x,X)^T [K(X,X) + lambda_sq I]^{-1} k(x,X)` over all of `queries`.
pub fn posterior_var_regularized(
    spec: &KernelSpec,
    queries: &Points,
    x: &[f64],
    lambda_sq: f64,
) -> f64 {
    assert!(
        lambda_sq > 0.0 && lambda_sq.is_finite(),
        "regularizer must be positive (got {lambda_sq})"
    );
    assert_eq!(x.len(), queries.dim(), "query dimension mismatch");
    let prior = spec.eval(x, x);
    if queries.is_empty() {
        return prior;
    }
    let gram = gram_matrix(spec, queries);
    let chol = CholeskyFactor::factorize(queries.len(), |i, j| {
        if i == j {
            gram[(i, j)] + lambda_sq
        } else {
            gram[(i, j)]
        }
    })
    .expect("K + lambda^2 I is positive definite");
    let mut v = kernel_vector(spec, queries, x);
    chol.forward_solve_in_place(&mut v);
    (prior - dot(&v, &v)).clamp(0.0, prior)
}
