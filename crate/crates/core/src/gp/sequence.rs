use crate::error::Result;
use crate::kernels::{gram_matrix, KernelSpec};
use crate::linalg::{dot, Matrix};
use crate::points::Points;

use super::History;

/// Gram matrix of a raw query sequence, reused across regularizers and
/// prefix lengths.
///
/// The Cholesky pivots of `I + lambda^{-2} K(X_t, X_t)` are
/// `1 + sigma_lambda^2(x_s; X_{s-1}) / lambda^2` for `s = 1..t`, so one
/// factorization yields both the per-step regularized variances and the
/// information gain of every prefix.
#[derive(Debug, Clone)]
pub struct SequenceGram {
    gram: Matrix,
}

impl SequenceGram {
    pub fn new(spec: &KernelSpec, points: &Points) -> Self {
        SequenceGram {
            gram: gram_matrix(spec, points),
        }
    }

    pub fn len(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.gram.rows() == 0
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// Squared Cholesky pivots of `I + lambda^{-2} K` over the first `prefix`
    /// queries.
    ///
    /// Pivots are floored at 1, their exact lower bound; below `lambda ~ 1e-6`
    /// the subtraction inside the factorization loses the identity term to
    /// cancellation.
    pub fn regularized_pivots(&self, prefix: usize, lambda_sq: f64) -> Vec<f64> {
        assert!(
            lambda_sq > 0.0 && lambda_sq.is_finite(),
            "regularizer must be positive (got {lambda_sq})"
        );
        assert!(prefix <= self.len());
        let scale = 1.0 / lambda_sq;
        let mut packed = Vec::with_capacity(prefix * (prefix + 1) / 2);
        let mut pivots = Vec::with_capacity(prefix);
        let mut row = Vec::with_capacity(prefix);
        for i in 0..prefix {
            row.clear();
            let g = self.gram.row(i);
            for j in 0..i {
                let start = j * (j + 1) / 2;
                let lj = &packed[start..start + j + 1];
                let s = dot(&row[..j], &lj[..j]);
                row.push((scale * g[j] - s) / lj[j]);
            }
            let p = (1.0 + scale * g[i] - dot(&row, &row)).max(1.0);
            pivots.push(p);
            packed.extend_from_slice(&row);
            packed.push(p.sqrt());
        }
        pivots
    }

    /// `sigma_lambda^2(x_s; X_{s-1})` for each `s` in the first `prefix` steps.
    pub fn regularized_variances(&self, prefix: usize, lambda_sq: f64) -> Vec<f64> {
        self.regularized_pivots(prefix, lambda_sq)
            .into_iter()
            .map(|p| lambda_sq * (p - 1.0))
            .collect()
    }

    /// `1/2 ln det(I + lambda^{-2} K)` over the first `prefix` queries.
    pub fn information_gain(&self, prefix: usize, lambda_sq: f64) -> f64 {
        0.5 * self
            .regularized_pivots(prefix, lambda_sq)
            .iter()
            .map(|p| p.ln())
            .sum::<f64>()
    }

    /// Information gain of every prefix `1..=prefix` under one regularizer.
    pub fn prefix_gains(&self, prefix: usize, lambda_sq: f64) -> Vec<f64> {
        let mut acc = 0.0;
        self.regularized_pivots(prefix, lambda_sq)
            .iter()
            .map(|p| {
                acc += 0.5 * p.ln();
                acc
            })
            .collect()
    }
}

/// `1/2 ln det(I + lambda^{-2} K(points, points))` for this concrete sequence.
pub fn realized_information_gain(spec: &KernelSpec, points: &Points, lambda_sq: f64) -> f64 {
    assert!(
        lambda_sq > 0.0 && lambda_sq.is_finite(),
        "regularizer must be positive (got {lambda_sq})"
    );
    if points.is_empty() {
        return 0.0;
    }
    SequenceGram::new(spec, points).information_gain(points.len(), lambda_sq)
}

/// Noise-free `sigma(x_t; X_{t-1})` for every step of `points`.
pub fn sequential_std(spec: &KernelSpec, points: &Points) -> Result<Vec<f64>> {
    let mut history = History::new(*spec, points.dim());
    let mut out = Vec::with_capacity(points.len());
    for x in points.iter() {
        out.push(history.posterior(x)?.std);
        // Values do not affect variances.
        history.extend(x, 0.0)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::posterior_var_regularized;

    fn se() -> KernelSpec {
        KernelSpec::squared_exponential(0.25).unwrap()
    }

    #[test]
    fn gain_trivial_cases() {
        let one = Points::from_rows(2, [[0.4, 0.4]]);
        assert!((realized_information_gain(&se(), &one, 1.0) - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((realized_information_gain(&se(), &one, 1.0) - 0.34657).abs() < 1e-5);
        assert_eq!(realized_information_gain(&se(), &Points::new(2), 0.3), 0.0);
    }

    #[test]
    fn pivots_match_regularized_posterior() {
        let pts = Points::from_rows(
            2,
            [
                [0.1, 0.2],
                [0.15, 0.22],
                [0.9, 0.5],
                [0.1, 0.2],
                [0.5, 0.5],
                [0.52, 0.49],
            ],
        );
        let sg = SequenceGram::new(&se(), &pts);
        for lambda_sq in [1e-4, 0.01, 0.3, 2.0] {
            let vars = sg.regularized_variances(pts.len(), lambda_sq);
            for (t, v) in vars.iter().enumerate() {
                let direct =
                    posterior_var_regularized(&se(), &pts.prefix(t), pts.get(t), lambda_sq);
                assert!(
                    (v - direct).abs() < 1e-10,
                    "t={t} lambda^2={lambda_sq}: {v} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn prefix_gains_are_consistent() {
        let pts = Points::grid(4, 2);
        let sg = SequenceGram::new(&se(), &pts);
        let gains = sg.prefix_gains(pts.len(), 0.05);
        for (t, g) in gains.iter().enumerate() {
            assert!((g - sg.information_gain(t + 1, 0.05)).abs() < 1e-12);
        }
        assert!(gains.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn sequential_std_starts_at_prior_and_zeroes_duplicates() {
        let pts = Points::from_rows(1, [[0.3], [0.7], [0.3]]);
        let s = sequential_std(&se(), &pts).unwrap();
        assert_eq!(s[0], 1.0);
        assert!(s[1] > 0.0 && s[1] < 1.0);
        assert!(s[2] < 1e-5);
    }
}
