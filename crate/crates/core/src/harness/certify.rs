use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::store::{load_traces, write_json, CERTIFICATE_DIR};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Smoothness};
use crate::points::Points;
use crate::theory_checks::{
    schedule_shape_check, CumulativeCertificate, EliminationCheck, EllipticalCount,
    LambdaCertificate, ScheduleFamily, SequenceAnalysis, ShapeFit,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    /// Radii for the elliptical potential counts.
    pub lambdas: Vec<f64>,
    /// `lambda` for the sequence elimination check.
    pub elimination_lambda: f64,
    /// Only certify these policies; all when `None`.
    pub policies: Option<Vec<String>>,
    /// Stop after this many traces, in file order.
    pub max_traces: Option<usize>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            lambdas: vec![0.02, 0.05, 0.1, 0.3],
            elimination_lambda: 0.1,
            policies: None,
            max_traces: None,
        }
    }
}

/// Everything checked on one stored trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCertificate {
    pub policy: String,
    pub seed: u64,
    pub kernel: KernelSpec,
    pub horizon: usize,
    pub elliptical: Vec<EllipticalCount>,
    pub final_lambda: Option<LambdaCertificate>,
    pub cumulative: Option<CumulativeCertificate>,
    pub elimination: Option<EliminationCheck>,
    /// `None` when fewer certified steps than the fit needs.
    pub schedule: Option<ShapeFit>,
    /// Elliptical counts, final lambda certificate and cumulative certificate all hold.
    pub pass: bool,
}

fn schedule_family(spec: &KernelSpec) -> (ScheduleFamily, f64) {
    match spec.smoothness() {
        None => (ScheduleFamily::Se, 0.0),
        Some(s) => (ScheduleFamily::Matern, Smoothness::value(s)),
    }
}

/// Certifies one query sequence given as grid indices.
pub fn certify_trace(
    spec: KernelSpec,
    grid: &Points,
    policy: &str,
    seed: u64,
    chosen: &[usize],
    options: &CertifyOptions,
) -> Result<TraceCertificate> {
    let horizon = chosen.len();
    let analysis = SequenceAnalysis::new(spec, grid.select(chosen))?;
    let elliptical: Vec<EllipticalCount> = options
        .lambdas
        .iter()
        .map(|&l| analysis.elliptical_count(l))
        .collect();
    let (final_lambda, cumulative) = if horizon >= 2 {
        (
            Some(analysis.lambda_certificate(horizon)),
            Some(analysis.cumulative_certificate(horizon)),
        )
    } else {
        (None, None)
    };
    let elimination = analysis.elimination_step_check(options.elimination_lambda)?;
    let schedule = match &cumulative {
        Some(c) => {
            let (family, nu) = schedule_family(&spec);
            match schedule_shape_check(family, grid.dim(), nu, &c.lambda_trace()) {
                Ok(fit) => Some(fit),
                Err(Error::InsufficientSteps { .. }) => None,
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    let pass = elliptical.iter().all(|c| c.holds)
        && final_lambda.is_none_or(|c| c.pass)
        && cumulative.as_ref().is_none_or(|c| c.pass);
    Ok(TraceCertificate {
        policy: policy.to_string(),
        seed,
        kernel: spec,
        horizon,
        elliptical,
        final_lambda,
        cumulative,
        elimination,
        schedule,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifySummary {
    pub traces: usize,
    pub passed: usize,
    /// `(policy, seed)` of every failing trace.
    pub failed: Vec<(String, u64)>,
    pub schedule_fits: usize,
    pub schedule_passed: usize,
    pub elimination_checks: usize,
    pub elimination_held: usize,
}

/// Certifies the traces stored in an experiment directory and writes one
/// JSON report per trace plus a summary under `certificates/`.
pub fn certify_dir(dir: &Path, options: &CertifyOptions) -> Result<CertifySummary> {
    let (manifest, traces) = load_traces(dir)?;
    let config = &manifest.config;
    let grid = Points::grid(config.grid_resolution, config.dim);
    let selected: Vec<_> = traces
        .into_iter()
        .filter(|t| {
            options
                .policies
                .as_ref()
                .is_none_or(|ps| ps.contains(&t.policy))
        })
        .take(options.max_traces.unwrap_or(usize::MAX))
        .collect();

    let certificates = selected
        .par_iter()
        .map(|t| {
            certify_trace(
                config.kernel,
                &grid,
                &t.policy,
                t.seed,
                &t.chosen_indices(),
                options,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let out = dir.join(CERTIFICATE_DIR);
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    for c in &certificates {
        write_json(&out.join(format!("{}_seed{}.json", c.policy, c.seed)), c)?;
    }
    let summary = CertifySummary {
        traces: certificates.len(),
        passed: certificates.iter().filter(|c| c.pass).count(),
        failed: certificates
            .iter()
            .filter(|c| !c.pass)
            .map(|c| (c.policy.clone(), c.seed))
            .collect(),
        schedule_fits: certificates.iter().filter(|c| c.schedule.is_some()).count(),
        schedule_passed: certificates
            .iter()
            .filter(|c| c.schedule.is_some_and(|s| s.pass))
            .count(),
        elimination_checks: certificates
            .iter()
            .filter(|c| c.elimination.is_some())
            .count(),
        elimination_held: certificates
            .iter()
            .filter(|c| c.elimination.is_some_and(|e| e.holds))
            .count(),
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}
