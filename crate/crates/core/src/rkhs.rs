//! Ground-truth objectives built as finite kernel expansions.
//!
//! `f(x) = sum_m c_m k(x_m, x)` lies in the RKHS of `k` with norm
//! `sqrt(c^T K c)`, which is computed exactly and cached at construction.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, KernelSpec};
use crate::points::Points;

const NORM_TOLERANCE: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkhsFunction {
    spec: KernelSpec,
    centers: Points,
    coefficients: Vec<f64>,
    norm: f64,
    /// Seed provenance, when the function came from a seeded stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl RkhsFunction {
    pub fn new(spec: KernelSpec, centers: Points, coefficients: Vec<f64>) -> Result<Self> {
        if centers.len() != coefficients.len() {
            return Err(Error::InvalidConfig(format!(
                "{} centers but {} coefficients",
                centers.len(),
                coefficients.len()
            )));
        }
        let norm = quadratic_form_norm(&spec, &centers, &coefficients)?;
        Ok(RkhsFunction {
            spec,
            centers,
            coefficients,
            norm,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.centers.dim()
    }

    /// Cached RKHS norm `B`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "evaluation point dimension mismatch");
        self.centers
            .iter()
            .zip(&self.coefficients)
            .map(|(c, w)| w * self.spec.eval(c, x))
            .sum()
    }

    pub fn evaluate_all(&self, points: &Points) -> Vec<f64> {
        points.iter().map(|x| self.evaluate(x)).collect()
    }

    /// Recomputes `sqrt(c^T K c)` from scratch.
    pub fn rkhs_norm(&self) -> Result<f64> {
        quadratic_form_norm(&self.spec, &self.centers, &self.coefficients)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let coefficients = self.coefficients.iter().map(|c| c * factor).collect();
        let mut out = RkhsFunction::new(self.spec, self.centers.clone(), coefficients)?;
        out.seed = self.seed;
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RKHS functions always serialize")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: RkhsFunction = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        // Never trust a serialized norm.
        let mut f = RkhsFunction::new(raw.spec, raw.centers, raw.coefficients)?;
        f.seed = raw.seed;
        Ok(f)
    }
}

fn quadratic_form_norm(spec: &KernelSpec, centers: &Points, coefficients: &[f64]) -> Result<f64> {
    let gram = gram_matrix(spec, centers);
    let mut q = 0.0;
    for (i, ci) in coefficients.iter().enumerate() {
        let row = gram.row(i);
        q += ci
            * row
                .iter()
                .zip(coefficients)
                .map(|(k, cj)| k * cj)
                .sum::<f64>();
    }
    if q < NORM_TOLERANCE || q.is_nan() {
        return Err(Error::NegativeNorm(q));
    }
    Ok(q.max(0.0).sqrt())
}

/// Draws `m` coefficients from `Uniform[-1, 1]` and `m` centers from
/// `Uniform([0, 1]^dim)`. Coefficients are drawn first, then centers.
pub fn sample_objective<R: Rng + ?Sized>(
    spec: KernelSpec,
    dim: usize,
    m: usize,
    rng: &mut R,
) -> RkhsFunction {
    assert!(m >= 1, "expansion size must be >= 1");
    assert!(dim >= 1, "dimension must be >= 1");
    let coefficients: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let coords: Vec<f64> = (0..m * dim).map(|_| rng.random_range(0.0..=1.0)).collect();
    RkhsFunction::new(spec, Points::from_flat(dim, coords), coefficients)
        .expect("kernel Gram matrices are positive semidefinite")
}

/// Lowest index attaining the maximum of `values`, and that maximum.
pub fn argmax(values: &[f64]) -> (usize, f64) {
    assert!(!values.is_empty(), "argmax of an empty slice");
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    fn se() -> KernelSpec {
        KernelSpec::squared_exponential(0.25).unwrap()
    }

    #[test]
    fn single_term_norm_is_one() {
        let f = RkhsFunction::new(se(), Points::from_rows(2, [[0.3, 0.3]]), vec![1.0]).unwrap();
        assert_eq!(f.norm(), 1.0);
        assert_eq!(f.evaluate(&[0.3, 0.3]), 1.0);
    }

    #[test]
    fn two_term_norm() {
        let f = RkhsFunction::new(
            se(),
            Points::from_rows(2, [[0.0, 0.0], [0.25, 0.0]]),
            vec![1.0, 1.0],
        )
        .unwrap();
        let expected = (2.0 + 2.0 * (-0.5f64).exp()).sqrt();
        assert!((f.norm() - expected).abs() < 1e-14);
        assert!((f.norm() - 1.79250).abs() < 1e-5);
    }

    #[test]
    fn zero_coefficients_vanish() {
        let f = RkhsFunction::new(se(), Points::grid(3, 2), vec![0.0; 9]).unwrap();
        assert_eq!(f.norm(), 0.0);
        for x in Points::grid(5, 2).iter() {
            assert_eq!(f.evaluate(x), 0.0);
        }
    }

    #[test]
    fn scaling_doubles_norm() {
        let f = sample_objective(se(), 2, 10, &mut StreamKey::new(1, 0).stream("t"));
        let g = f.scaled(2.0).unwrap();
        assert!((g.norm() - 2.0 * f.norm()).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        let key = StreamKey::new(42, 5);
        let a = sample_objective(se(), 2, 50, &mut key.stream("objective"));
        let b = sample_objective(se(), 2, 50, &mut key.stream("objective"));
        assert_eq!(a.norm().to_bits(), b.norm().to_bits());
        assert_eq!(a, b);
        assert!(a.coefficients().iter().all(|c| (-1.0..=1.0).contains(c)));
        assert!(a
            .centers()
            .as_flat()
            .iter()
            .all(|c| (0.0..=1.0).contains(c)));
        assert!((a.rkhs_norm().unwrap() - a.norm()).abs() < 1e-8);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        let f = sample_objective(
            KernelSpec::matern(1.5, 0.25).unwrap(),
            2,
            4,
            &mut StreamKey::new(3, 1).stream("o"),
        )
        .with_seed(3);
        f.write_json(&path).unwrap();
        assert_eq!(RkhsFunction::read_json(&path).unwrap(), f);
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), (1, 3.0));
    }
}
