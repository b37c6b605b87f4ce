//! Empirical certificates for posterior-deviation bounds on realized query
//! sequences.
//!
//! The bounds are stated in terms of the maximum information gain, a
//! supremum over all sequences whose constants are not computable. Each
//! certificate here replaces it with the *realized* information gain
//! `1/2 ln det(I + lambda^{-2} K(X_t, X_t))` of the concrete sequence:
//!
//! * [`elliptical_count`]: the number of steps whose regularized posterior
//!   standard deviation exceeds `lambda` is at most `2 gain / ln 2`.
//! * [`lambda_certificate`]: the smallest `lambda` with
//!   `3 gain_t(lambda^2) <= t - 1`, found by bisection, upper-bounds the
//!   smallest noise-free posterior standard deviation seen so far.
//! * [`cumulative_certificate`]: the sum of posterior standard deviations is
//!   at most `T_bar - 1 + sum_{t >= T_bar} lambda_t`.
//! * [`schedule_shape_check`]: fits the asymptotic shape of `lambda_t^2`
//!   to the certified sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{sequential_std, SequenceGram};
use crate::kernels::KernelSpec;
use crate::points::Points;

pub const LAMBDA_LOWER: f64 = 1e-8;
pub const LAMBDA_UPPER: f64 = 1.0;
/// Bisection stops once `hi / lo <= 1 + BISECTION_REL_WIDTH`.
pub const BISECTION_REL_WIDTH: f64 = 1e-4;
pub const BISECTION_MAX_ITERS: usize = 60;
pub const MIN_STD_TOLERANCE: f64 = 1e-9;
pub const CUMULATIVE_TOLERANCE: f64 = 1e-6;
pub const SHAPE_MIN_STEPS: usize = 50;
pub const SHAPE_ENVELOPE_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticalCount {
    pub lambda: f64,
    pub count: usize,
    pub realized_gain: f64,
    /// `2 gain / ln 2`.
    pub bound: f64,
    /// `3 gain`, the looser constant.
    pub loose_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaCertificate {
    pub t: usize,
    pub lambda_star: f64,
    /// Realized gain at `lambda_star^2`.
    pub realized_gain: f64,
    pub min_std: f64,
    /// Whether any `lambda` in the bracket satisfies the gain constraint.
    pub feasible: bool,
    /// `lambda_star` sits at the lower bracket edge rather than a bisected value.
    pub at_lower_bracket: bool,
    pub pass: bool,
}

impl LambdaCertificate {
    /// `min_std <= lambda_star` and `3 gain <= t - 1`.
    pub fn margin(&self) -> f64 {
        self.lambda_star - self.min_std
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeCertificate {
    pub t: usize,
    /// First step from which every prefix admits a feasible `lambda`;
    /// `t + 1` when the final prefix itself is infeasible.
    pub t_bar: usize,
    pub steps: Vec<LambdaCertificate>,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl CumulativeCertificate {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `(t, lambda_t)` for the certified steps.
    pub fn lambda_trace(&self) -> Vec<(usize, f64)> {
        self.steps.iter().map(|c| (c.t, c.lambda_star)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationCheck {
    /// 1-based step removed from the sequence.
    pub removed_step: usize,
    pub checked_steps: usize,
    /// Smallest `sigma_reduced - sigma_original` over the later steps.
    pub min_margin: f64,
    pub holds: bool,
}

/// Shared state for analysing one query sequence.
#[derive(Debug, Clone)]
pub struct SequenceAnalysis {
    spec: KernelSpec,
    points: Points,
    gram: SequenceGram,
    stds: Vec<f64>,
}

impl SequenceAnalysis {
    pub fn new(spec: KernelSpec, points: Points) -> Result<Self> {
        let stds = sequential_std(&spec, &points)?;
        let gram = SequenceGram::new(&spec, &points);
        Ok(SequenceAnalysis {
            spec,
            points,
            gram,
            stds,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sigma(x_t; X_{t-1})` for each step.
    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn gain(&self, t: usize, lambda: f64) -> f64 {
        self.gram.information_gain(t, lambda * lambda)
    }

    fn feasible(&self, t: usize, lambda: f64) -> (bool, f64) {
        let gain = self.gain(t, lambda);
        (3.0 * gain <= (t - 1) as f64, gain)
    }

    pub fn elliptical_count(&self, lambda: f64) -> EllipticalCount {
        assert!(lambda > 0.0, "lambda must be positive (got {lambda})");
        let t = self.len();
        let pivots = self.gram.regularized_pivots(t, lambda * lambda);
        // sigma_lambda > lambda  <=>  1 + sigma_lambda^2 / lambda^2 > 2
        let count = pivots.iter().filter(|&&p| p > 2.0).count();
        let realized_gain = 0.5 * pivots.iter().map(|p| p.ln()).sum::<f64>();
        let bound = 2.0 * realized_gain / std::f64::consts::LN_2;
        EllipticalCount {
            lambda,
            count,
            realized_gain,
            bound,
            loose_bound: 3.0 * realized_gain,
            holds: count as f64 <= bound,
        }
    }

    pub fn lambda_certificate(&self, t: usize) -> LambdaCertificate {
        assert!(t >= 2, "certificates need t >= 2");
        assert!(t <= self.len(), "t exceeds the sequence length");
        let min_std = self.stds[..t].iter().copied().fold(f64::INFINITY, f64::min);
        let (feasible_hi, gain_hi) = self.feasible(t, LAMBDA_UPPER);
        if !feasible_hi {
            return LambdaCertificate {
                t,
                lambda_star: LAMBDA_UPPER,
                realized_gain: gain_hi,
                min_std,
                feasible: false,
                at_lower_bracket: false,
                pass: false,
            };
        }
        let (feasible_lo, gain_lo) = self.feasible(t, LAMBDA_LOWER);
        let (lambda_star, realized_gain, at_lower_bracket) = if feasible_lo {
            (LAMBDA_LOWER, gain_lo, true)
        } else {
            let (mut lo, mut hi, mut gain_at_hi) = (LAMBDA_LOWER, LAMBDA_UPPER, gain_hi);
            let mut iters = 0;
            while hi / lo > 1.0 + BISECTION_REL_WIDTH && iters < BISECTION_MAX_ITERS {
                let mid = (lo * hi).sqrt();
                let (ok, gain) = self.feasible(t, mid);
                if ok {
                    hi = mid;
                    gain_at_hi = gain;
                } else {
                    lo = mid;
                }
                iters += 1;
            }
            (hi, gain_at_hi, false)
        };
        let pass =
            3.0 * realized_gain <= (t - 1) as f64 && min_std <= lambda_star + MIN_STD_TOLERANCE;
        LambdaCertificate {
            t,
            lambda_star,
            realized_gain,
            min_std,
            feasible: true,
            at_lower_bracket,
            pass,
        }
    }

    /// Smallest `t_bar >= 2` such that every prefix `t_bar..=t` is feasible.
    pub fn t_bar(&self, t: usize) -> usize {
        let gains = self.gram.prefix_gains(t, LAMBDA_UPPER * LAMBDA_UPPER);
        let mut t_bar = t + 1;
        for s in (2..=t).rev() {
            if 3.0 * gains[s - 1] <= (s - 1) as f64 {
                t_bar = s;
            } else {
                break;
            }
        }
        t_bar
    }

    pub fn cumulative_certificate(&self, t: usize) -> CumulativeCertificate {
        assert!(t >= 2, "certificates need t >= 2");
        assert!(t <= self.len(), "t exceeds the sequence length");
        let t_bar = self.t_bar(t);
        let steps: Vec<LambdaCertificate> =
            (t_bar..=t).map(|s| self.lambda_certificate(s)).collect();
        let lhs: f64 = self.stds[..t].iter().sum();
        let rhs = (t_bar - 1) as f64 + steps.iter().map(|c| c.lambda_star).sum::<f64>();
        CumulativeCertificate {
            t,
            t_bar,
            steps,
            lhs,
            rhs,
            pass: lhs <= rhs + CUMULATIVE_TOLERANCE,
        }
    }

    /// Removes the first step whose regularized standard deviation is at
    /// most `lambda`, then checks that every later step's noise-free
    /// standard deviation did not shrink.
    pub fn elimination_step_check(&self, lambda: f64) -> Result<Option<EliminationCheck>> {
        let t = self.len();
        let pivots = self.gram.regularized_pivots(t, lambda * lambda);
        let Some(removed) = pivots.iter().position(|&p| p <= 2.0) else {
            return Ok(None);
        };
        let kept: Vec<usize> = (0..t).filter(|&i| i != removed).collect();
        let reduced = sequential_std(&self.spec, &self.points.select(&kept))?;
        let mut min_margin = f64::INFINITY;
        for orig in removed + 1..t {
            let margin = reduced[orig - 1] - self.stds[orig];
            min_margin = min_margin.min(margin);
        }
        Ok(Some(EliminationCheck {
            removed_step: removed + 1,
            checked_steps: t - removed - 1,
            min_margin,
            holds: min_margin >= -MIN_STD_TOLERANCE,
        }))
    }
}

pub fn elliptical_count(
    spec: &KernelSpec,
    sequence: &Points,
    lambda: f64,
) -> Result<EllipticalCount> {
    Ok(SequenceAnalysis::new(*spec, sequence.clone())?.elliptical_count(lambda))
}

pub fn lambda_certificate(
    spec: &KernelSpec,
    sequence: &Points,
    t: usize,
) -> Result<LambdaCertificate> {
    Ok(SequenceAnalysis::new(*spec, sequence.prefix(t))?.lambda_certificate(t))
}

pub fn cumulative_certificate(
    spec: &KernelSpec,
    sequence: &Points,
    t: usize,
) -> Result<CumulativeCertificate> {
    Ok(SequenceAnalysis::new(*spec, sequence.prefix(t))?.cumulative_certificate(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleFamily {
    /// `lambda_t^2 = t exp(-C t^{1/(d+1)})`
    Se,
    /// `lambda_t^2 = C t^{-2nu/d} (ln t)^{2nu/d}`
    Matern,
}

/// A regularization schedule with its fitted constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub family: ScheduleFamily,
    pub dim: usize,
    /// Matérn smoothness; ignored for the SE family.
    pub nu: f64,
    pub constant: f64,
}

impl ScheduleSpec {
    /// `lambda_t^2`.
    pub fn lambda_sq(&self, t: usize) -> f64 {
        let t = t as f64;
        let d = self.dim as f64;
        match self.family {
            ScheduleFamily::Se => t * (-self.constant * t.powf(1.0 / (d + 1.0))).exp(),
            ScheduleFamily::Matern => {
                let e = 2.0 * self.nu / d;
                self.constant * t.powf(-e) * t.ln().powf(e)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeFit {
    pub schedule: ScheduleSpec,
    pub steps_used: usize,
    pub rms_log_residual: f64,
    /// Smallest factor `A` with `A * fitted(t) >= lambda_t^2` at every step.
    pub envelope_multiplier: f64,
    pub pass: bool,
}

/// Least-squares fit of the schedule's free constant on `ln lambda_t^2`.
///
/// Passes when the fitted constant is positive and the fitted curve,
/// inflated by at most [`SHAPE_ENVELOPE_LIMIT`], dominates every `lambda_t^2`.
pub fn schedule_shape_check(
    family: ScheduleFamily,
    dim: usize,
    nu: f64,
    trace: &[(usize, f64)],
) -> Result<ShapeFit> {
    let usable: Vec<(f64, f64)> = trace
        .iter()
        .filter(|&&(t, l)| t >= 2 && l > 0.0 && l.is_finite())
        .map(|&(t, l)| (t as f64, 2.0 * l.ln()))
        .collect();
    if usable.len() < SHAPE_MIN_STEPS {
        return Err(Error::InsufficientSteps {
            required: SHAPE_MIN_STEPS,
            found: usable.len(),
        });
    }
    let d = dim as f64;
    let constant = match family {
        ScheduleFamily::Se => {
            // ln lambda^2 - ln t = -C s, s = t^{1/(d+1)}
            let (mut num, mut den) = (0.0, 0.0);
            for &(t, y) in &usable {
                let s = t.powf(1.0 / (d + 1.0));
                num += (y - t.ln()) * s;
                den += s * s;
            }
            -num / den
        }
        ScheduleFamily::Matern => {
            let e = 2.0 * nu / d;
            let mean_log = usable
                .iter()
                .map(|&(t, y)| y - (-e * t.ln() + e * t.ln().ln()))
                .sum::<f64>()
                / usable.len() as f64;
            mean_log.exp()
        }
    };
    let schedule = ScheduleSpec {
        family,
        dim,
        nu,
        constant,
    };
    let residuals: Vec<f64> = usable
        .iter()
        .map(|&(t, y)| y - schedule.lambda_sq(t as usize).ln())
        .collect();
    let rms_log_residual =
        (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    let envelope_multiplier = residuals
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .exp()
        .max(1.0);
    let pass =
        constant > 0.0 && constant.is_finite() && envelope_multiplier <= SHAPE_ENVELOPE_LIMIT;
    Ok(ShapeFit {
        schedule,
        steps_used: usable.len(),
        rms_log_residual,
        envelope_multiplier,
        pass,
    })
}
