use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::dot;
use crate::points::Points;

use super::{clamp_variance, Extension, History, PosteriorSummary, NEGATIVE_VARIANCE_LIMIT};

/// Posterior over a fixed finite candidate set, kept current as observations
/// arrive.
///
/// For every candidate `c` the cache holds the projection `L^{-1} k(E, c)`
/// (one column per effective-set member), its squared norm, and the
/// posterior mean. Inserting a point into the effective set appends one
/// column, so a step costs `O(|candidates| * |E|)` rather than a fresh
/// triangular solve per candidate.
#[derive(Debug, Clone)]
pub struct CandidatePosterior {
    candidates: Points,
    history: History,
    // columns[j][c] = (L^{-1} k(E, c))_j
    columns: Vec<Vec<f64>>,
    explained: Vec<f64>,
    mean: Vec<f64>,
    epoch: u64,
}

impl CandidatePosterior {
    pub fn new(spec: KernelSpec, candidates: Points) -> Self {
        assert!(!candidates.is_empty(), "candidate set must be non-empty");
        let n = candidates.len();
        let history = History::new(spec, candidates.dim());
        CandidatePosterior {
            candidates,
            epoch: history.epoch(),
            history,
            columns: Vec::new(),
            explained: vec![0.0; n],
            mean: vec![0.0; n],
        }
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn candidates(&self) -> &Points {
        &self.candidates
    }

    pub fn spec(&self) -> &KernelSpec {
        self.history.spec()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    #[inline]
    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    /// Posterior variance at candidate `i`, clamped to `[0, k(x, x)]`.
    #[inline]
    pub fn variance(&self, i: usize) -> f64 {
        let prior = self.history.spec().variance();
        (prior - self.explained[i]).clamp(0.0, prior)
    }

    #[inline]
    pub fn std(&self, i: usize) -> f64 {
        self.variance(i).sqrt()
    }

    pub fn summary(&self, i: usize) -> PosteriorSummary {
        PosteriorSummary {
            mean: self.mean[i],
            std: self.std(i),
        }
    }

    pub fn summaries(&self) -> Vec<PosteriorSummary> {
        (0..self.len()).map(|i| self.summary(i)).collect()
    }

    /// Observes `y` at candidate `index`.
    pub fn observe(&mut self, index: usize, y: f64) -> Result<Extension> {
        let prior = self.history.spec().variance();
        let raw = prior - self.explained[index];
        clamp_variance(raw, prior)?;
        let l: Vec<f64> = self.columns.iter().map(|col| col[index]).collect();
        let x = self.candidates.get(index).to_vec();
        self.absorb(&x, y, &l, raw)
    }

    /// Observes `y` at an arbitrary point, which need not be a candidate.
    pub fn observe_point(&mut self, x: &[f64], y: f64) -> Result<Extension> {
        let prior = self.history.spec().eval(x, x);
        let l = self.history.project(x);
        let raw = prior - dot(&l, &l);
        clamp_variance(raw, prior)?;
        self.absorb(x, y, &l, raw)
    }

    fn absorb(&mut self, x: &[f64], y: f64, l: &[f64], raw: f64) -> Result<Extension> {
        let outcome = self.history.extend_projected(x, y, l, raw)?;
        if outcome == Extension::Correlated {
            return Ok(outcome);
        }
        if self.history.epoch() != self.epoch {
            self.rebuild();
        } else {
            self.append_column(x, l);
        }
        self.check_variances()?;
        Ok(outcome)
    }

    fn append_column(&mut self, x: &[f64], l: &[f64]) {
        let spec = *self.history.spec();
        let last = self.history.factor().dim() - 1;
        let d = self.history.factor().diag(last);
        let w = self.history.whitened()[last];
        let mut col: Vec<f64> = self.candidates.iter().map(|c| spec.eval(x, c)).collect();
        for (coef, prev) in l.iter().zip(&self.columns) {
            for (v, p) in col.iter_mut().zip(prev) {
                *v -= coef * p;
            }
        }
        for ((v, e), m) in col.iter_mut().zip(&mut self.explained).zip(&mut self.mean) {
            *v /= d;
            *e += *v * *v;
            *m += *v * w;
        }
        self.columns.push(col);
    }

    /// Recomputes every cached projection from the current factor.
    fn rebuild(&mut self) {
        let spec = *self.history.spec();
        let factor = self.history.factor();
        let eff = self.history.effective_points();
        self.columns.clear();
        self.explained.iter_mut().for_each(|e| *e = 0.0);
        self.mean.iter_mut().for_each(|m| *m = 0.0);
        for j in 0..factor.dim() {
            let row = factor.row(j);
            let mut col: Vec<f64> = self
                .candidates
                .iter()
                .map(|c| spec.eval(eff.get(j), c))
                .collect();
            for (coef, prev) in row[..j].iter().zip(&self.columns) {
                for (v, p) in col.iter_mut().zip(prev) {
                    *v -= coef * p;
                }
            }
            let w = self.history.whitened()[j];
            for ((v, e), m) in col.iter_mut().zip(&mut self.explained).zip(&mut self.mean) {
                *v /= row[j];
                *e += *v * *v;
                *m += *v * w;
            }
            self.columns.push(col);
        }
        self.epoch = self.history.epoch();
    }

    fn check_variances(&self) -> Result<()> {
        let prior = self.history.spec().variance();
        for &e in &self.explained {
            let raw = prior - e;
            if raw < NEGATIVE_VARIANCE_LIMIT || raw.is_nan() {
                return Err(Error::NegativeVariance { variance: raw });
            }
        }
        Ok(())
    }
}
