//! Stationary covariance functions with unit variance.
//!
//! Two families are supported: the squared exponential kernel and the Matérn
//! kernel at the half-integer smoothness values `1/2`, `3/2` and `5/2`, where
//! the Matérn form reduces to an exponential times a polynomial in the
//! scaled distance. Every kernel satisfies `k(x, x) = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::points::Points;

/// Half-integer Matérn smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothness {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl Smoothness {
    pub fn value(self) -> f64 {
        match self {
            Smoothness::Half => 0.5,
            Smoothness::ThreeHalves => 1.5,
            Smoothness::FiveHalves => 2.5,
        }
    }

    pub fn from_value(nu: f64) -> Result<Self> {
        if nu == 0.5 {
            Ok(Smoothness::Half)
        } else if nu == 1.5 {
            Ok(Smoothness::ThreeHalves)
        } else if nu == 2.5 {
            Ok(Smoothness::FiveHalves)
        } else {
            Err(Error::InvalidConfig(format!(
                "Matérn smoothness must be one of 0.5, 1.5, 2.5 (got {nu})"
            )))
        }
    }
}

/// Kernel family and hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelSpec", into = "RawKernelSpec")]
pub enum KernelSpec {
    SquaredExponential { lengthscale: f64 },
    Matern { nu: Smoothness, lengthscale: f64 },
}

impl KernelSpec {
    pub fn squared_exponential(lengthscale: f64) -> Result<Self> {
        check_lengthscale(lengthscale)?;
        Ok(KernelSpec::SquaredExponential { lengthscale })
    }

    pub fn matern(nu: f64, lengthscale: f64) -> Result<Self> {
        check_lengthscale(lengthscale)?;
        Ok(KernelSpec::Matern {
            nu: Smoothness::from_value(nu)?,
            lengthscale,
        })
    }

    pub fn lengthscale(&self) -> f64 {
        match *self {
            KernelSpec::SquaredExponential { lengthscale } => lengthscale,
            KernelSpec::Matern { lengthscale, .. } => lengthscale,
        }
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        match *self {
            KernelSpec::SquaredExponential { .. } => None,
            KernelSpec::Matern { nu, .. } => Some(nu),
        }
    }

    /// `k(x, x2)`. Panics if the points differ in dimension or are not finite.
    #[inline]
    pub fn eval(&self, x: &[f64], x2: &[f64]) -> f64 {
        assert_eq!(x.len(), x2.len(), "kernel arguments differ in dimension");
        let mut sq = 0.0;
        for (a, b) in x.iter().zip(x2) {
            let diff = a - b;
            sq += diff * diff;
        }
        assert!(sq.is_finite(), "kernel arguments must be finite");
        self.eval_sq_distance(sq)
    }

    /// Kernel value as a function of the squared Euclidean distance.
    #[inline]
    pub fn eval_sq_distance(&self, sq: f64) -> f64 {
        match *self {
            KernelSpec::SquaredExponential { lengthscale } => {
                (-sq / (2.0 * lengthscale * lengthscale)).exp()
            }
            KernelSpec::Matern { nu, lengthscale } => {
                let r = sq.sqrt() / lengthscale;
                match nu {
                    Smoothness::Half => (-r).exp(),
                    Smoothness::ThreeHalves => {
                        let s = 3f64.sqrt() * r;
                        (1.0 + s) * (-s).exp()
                    }
                    Smoothness::FiveHalves => {
                        let s = 5f64.sqrt() * r;
                        (1.0 + s + 5.0 * r * r / 3.0) * (-s).exp()
                    }
                }
            }
        }
    }

    /// The prior variance `k(x, x)`; identically one for these families.
    #[inline]
    pub fn variance(&self) -> f64 {
        1.0
    }

    /// Short label used in file names and CSV provenance.
    pub fn label(&self) -> String {
        match *self {
            KernelSpec::SquaredExponential { .. } => "se".to_string(),
            KernelSpec::Matern { nu, .. } => match nu {
                Smoothness::Half => "matern12".to_string(),
                Smoothness::ThreeHalves => "matern32".to_string(),
                Smoothness::FiveHalves => "matern52".to_string(),
            },
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KernelSpec::SquaredExponential { lengthscale } => write!(f, "SE(l={lengthscale})"),
            KernelSpec::Matern { nu, lengthscale } => {
                write!(f, "Matern(nu={}, l={lengthscale})", nu.value())
            }
        }
    }
}

fn check_lengthscale(lengthscale: f64) -> Result<()> {
    if lengthscale.is_finite() && lengthscale > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "lengthscale must be positive and finite (got {lengthscale})"
        )))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    Se,
    Matern,
}

#[derive(Serialize, Deserialize)]
struct RawKernelSpec {
    family: Family,
    lengthscale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
}

impl TryFrom<RawKernelSpec> for KernelSpec {
    type Error = Error;

    fn try_from(raw: RawKernelSpec) -> Result<Self> {
        match raw.family {
            Family::Se => {
                if raw.nu.is_some() {
                    return Err(Error::InvalidConfig(
                        "the SE kernel takes no smoothness parameter".into(),
                    ));
                }
                KernelSpec::squared_exponential(raw.lengthscale)
            }
            Family::Matern => {
                let nu = raw.nu.ok_or_else(|| {
                    Error::InvalidConfig("the Matérn kernel requires `nu`".into())
                })?;
                KernelSpec::matern(nu, raw.lengthscale)
            }
        }
    }
}

impl From<KernelSpec> for RawKernelSpec {
    fn from(spec: KernelSpec) -> Self {
        match spec {
            KernelSpec::SquaredExponential { lengthscale } => RawKernelSpec {
                family: Family::Se,
                lengthscale,
                nu: None,
            },
            KernelSpec::Matern { nu, lengthscale } => RawKernelSpec {
                family: Family::Matern,
                lengthscale,
                nu: Some(nu.value()),
            },
        }
    }
}

/// `K(points, points)`: symmetric with unit diagonal.
pub fn gram_matrix(spec: &KernelSpec, points: &Points) -> Matrix {
    let n = points.len();
    let mut gram = Matrix::zeros(n, n);
    for i in 0..n {
        gram[(i, i)] = spec.eval(points.get(i), points.get(i));
        for j in 0..i {
            let v = spec.eval(points.get(i), points.get(j));
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    gram
}

/// `k(x, points)` as a vector.
pub fn kernel_vector(spec: &KernelSpec, points: &Points, x: &[f64]) -> Vec<f64> {
    points.iter().map(|p| spec.eval(p, x)).collect()
}
