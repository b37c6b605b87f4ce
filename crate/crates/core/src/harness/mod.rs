//! Seeded multi-run regret experiments.
//!
//! Each seed index fixes one objective and one initial point, shared by
//! every policy. Policies then run independently for `horizon` steps and
//! their traces are aggregated in seed order.

mod certify;
pub mod config;
mod store;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{Policy, PolicyConfig, PolicyKind};
use crate::error::{Error, Result};
use crate::gp::CandidatePosterior;
use crate::points::Points;
use crate::rkhs::{argmax, sample_objective, RkhsFunction};
use crate::rng::{labels, StreamKey};

pub use certify::{certify_dir, certify_trace, CertifyOptions, CertifySummary, TraceCertificate};
pub use config::{BetaMode, ConfigOverrides, ExperimentConfig};
pub use store::{
    load_traces, read_results, write_results, Manifest, ResultRow, StoredTrace, CERTIFICATE_DIR,
    CSV_HEADER, MANIFEST_FILE, OBJECTIVE_DIR, RESULTS_FILE, SUMMARY_FILE,
};

/// Slack on `|f - mu| <= B sigma` in audit mode.
pub const AUDIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step.
    pub t: usize,
    pub chosen_index: usize,
    pub f_value: f64,
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub simple_regret: f64,
    /// `sigma(x_t; X_{t-1})`, the posterior std at the chosen point before observing it.
    pub prior_std: f64,
}

/// Grid-wide confidence bound audit for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: usize,
    pub violations: usize,
    /// Largest `|f - mu| - B sigma` seen; negative when the bound is never tight.
    pub worst_excess: f64,
    /// `(step, grid index)` of the worst excess.
    pub worst_at: (usize, usize),
}

impl AuditReport {
    fn new() -> Self {
        AuditReport {
            checks: 0,
            violations: 0,
            worst_excess: f64::NEG_INFINITY,
            worst_at: (0, 0),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, step: usize, post: &CandidatePosterior, values: &[f64], bound: f64) {
        for (i, &f) in values.iter().enumerate() {
            let s = post.summary(i);
            let excess = (f - s.mean).abs() - bound * s.std;
            self.checks += 1;
            if excess > AUDIT_TOLERANCE {
                self.violations += 1;
            }
            if excess > self.worst_excess {
                self.worst_excess = excess;
                self.worst_at = (step, i);
            }
        }
    }

    /// The first violation as an error, if any.
    pub fn to_error(&self) -> Option<Error> {
        (!self.passed()).then_some(Error::ConfidenceViolation {
            step: self.worst_at.0,
            index: self.worst_at.1,
            deviation: self.worst_excess,
            allowed: AUDIT_TOLERANCE,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub policy: PolicyKind,
    pub seed: u64,
    /// Exact RKHS norm `B` of the objective.
    pub norm: f64,
    pub beta_sqrt: f64,
    pub f_star: f64,
    pub x_star_index: usize,
    pub steps: Vec<StepRecord>,
    pub audit: Option<AuditReport>,
}

impl RegretTrace {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// `R_t`, 1-based.
    pub fn cumulative(&self, t: usize) -> f64 {
        self.steps[t - 1].cum_regret
    }

    /// `r_t`, 1-based.
    pub fn simple(&self, t: usize) -> f64 {
        self.steps[t - 1].simple_regret
    }

    pub fn chosen_indices(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.chosen_index).collect()
    }

    /// Steps where `f* - f(x_t) > 2 beta^{1/2} sigma(x_t; X_{t-1}) + tol`.
    pub fn per_step_bound_violations(&self, tol: f64) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.inst_regret > 2.0 * self.beta_sqrt * s.prior_std + tol)
            .map(|s| s.t)
            .collect()
    }
}

/// The objective and initial point for one seed index.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub seed: u64,
    pub objective: RkhsFunction,
    /// Objective values on the grid.
    pub values: Vec<f64>,
    pub x_star_index: usize,
    pub f_star: f64,
    pub initial_index: usize,
}

impl Replicate {
    pub fn new(config: &ExperimentConfig, grid: &Points, seed: u64) -> Self {
        let key = StreamKey::new(config.master_seed, seed);
        let objective = sample_objective(
            config.kernel,
            config.dim,
            config.objective_size,
            &mut key.stream(labels::OBJECTIVE),
        )
        .with_seed(seed);
        let values = objective.evaluate_all(grid);
        let (x_star_index, f_star) = argmax(&values);
        let initial_index =
            rand::Rng::random_range(&mut key.stream(labels::INITIAL_POINT), 0..grid.len());
        Replicate {
            seed,
            objective,
            values,
            x_star_index,
            f_star,
            initial_index,
        }
    }

    pub fn info(&self) -> ReplicateInfo {
        ReplicateInfo {
            seed: self.seed,
            norm: self.objective.norm(),
            f_star: self.f_star,
            x_star_index: self.x_star_index,
            initial_index: self.initial_index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateInfo {
    pub seed: u64,
    pub norm: f64,
    pub f_star: f64,
    pub x_star_index: usize,
    pub initial_index: usize,
}

pub fn grid_for(config: &ExperimentConfig) -> Points {
    Points::grid(config.grid_resolution, config.dim)
}

pub fn run_single(
    config: &ExperimentConfig,
    policy: &PolicyConfig,
    seed: u64,
) -> Result<RegretTrace> {
    config.validate()?;
    let grid = grid_for(config);
    let replicate = Replicate::new(config, &grid, seed);
    run_replicate(config, &grid, &replicate, policy)
}

/// Runs one policy on an already sampled replicate.
pub fn run_replicate(
    config: &ExperimentConfig,
    grid: &Points,
    replicate: &Replicate,
    policy: &PolicyConfig,
) -> Result<RegretTrace> {
    let norm = replicate.objective.norm();
    let beta_sqrt = config.beta_mode.beta_sqrt(norm);
    let key = StreamKey::new(config.master_seed, replicate.seed);
    let mut selector = Policy::new(
        policy,
        beta_sqrt,
        grid.len(),
        key.stream(&labels::policy(policy.name())),
    )?;
    let mut post = CandidatePosterior::new(config.kernel, grid.clone());
    let mut audit = config.audit.then(AuditReport::new);
    if let Some(a) = audit.as_mut() {
        a.record(0, &post, &replicate.values, norm);
    }

    let f_star = replicate.f_star;
    let mut steps = Vec::with_capacity(config.horizon);
    let mut cum = 0.0;
    let mut best = f64::NEG_INFINITY;
    for t in 1..=config.horizon {
        let index = if t == 1 {
            replicate.initial_index
        } else {
            selector.select(&post)
        };
        let prior_std = post.std(index);
        let f = replicate.values[index];
        let inst = f_star - f;
        cum += inst;
        best = best.max(f);
        steps.push(StepRecord {
            t,
            chosen_index: index,
            f_value: f,
            inst_regret: inst,
            cum_regret: cum,
            simple_regret: f_star - best,
            prior_std,
        });
        post.observe(index, f)?;
        if let Some(a) = audit.as_mut() {
            a.record(t, &post, &replicate.values, norm);
        }
    }
    Ok(RegretTrace {
        policy: policy.kind,
        seed: replicate.seed,
        norm,
        beta_sqrt,
        f_star,
        x_star_index: replicate.x_star_index,
        steps,
        audit,
    })
}

/// Mean and standard error of the regrets of one policy at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub policy: String,
    pub t: usize,
    pub runs: usize,
    pub mean_cum_regret: f64,
    pub se_cum_regret: f64,
    pub mean_simple_regret: f64,
    pub se_simple_regret: f64,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-policy, per-step aggregates over `traces`, in the order `policies` lists them.
pub fn aggregate(
    traces: &[RegretTrace],
    policies: &[PolicyKind],
    horizon: usize,
) -> Vec<AggregateRow> {
    let mut rows = Vec::with_capacity(policies.len() * horizon);
    for &kind in policies {
        let runs: Vec<&RegretTrace> = traces.iter().filter(|tr| tr.policy == kind).collect();
        if runs.is_empty() {
            continue;
        }
        for t in 1..=horizon {
            let cum: Vec<f64> = runs.iter().map(|tr| tr.cumulative(t)).collect();
            let simple: Vec<f64> = runs.iter().map(|tr| tr.simple(t)).collect();
            let (mean_cum_regret, se_cum_regret) = mean_se(&cum);
            let (mean_simple_regret, se_simple_regret) = mean_se(&simple);
            rows.push(AggregateRow {
                policy: kind.name().to_string(),
                t,
                runs: runs.len(),
                mean_cum_regret,
                se_cum_regret,
                mean_simple_regret,
                se_simple_regret,
            });
        }
    }
    rows
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub replicates: Vec<ReplicateInfo>,
    pub objectives: Vec<RkhsFunction>,
    /// Seed-major, then in config policy order.
    pub traces: Vec<RegretTrace>,
    pub aggregates: Vec<AggregateRow>,
}

impl ExperimentResult {
    pub fn traces_for(&self, policy: PolicyKind) -> impl Iterator<Item = &RegretTrace> + '_ {
        self.traces.iter().filter(move |t| t.policy == policy)
    }

    pub fn aggregate_at(&self, policy: PolicyKind, t: usize) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|r| r.t == t && r.policy == policy.name())
    }

    pub fn mean_cumulative(&self, policy: PolicyKind, t: usize) -> Option<f64> {
        self.aggregate_at(policy, t).map(|r| r.mean_cum_regret)
    }

    pub fn mean_simple(&self, policy: PolicyKind, t: usize) -> Option<f64> {
        self.aggregate_at(policy, t).map(|r| r.mean_simple_regret)
    }

    /// Audit reports of every trace run in audit mode.
    pub fn audits(&self) -> impl Iterator<Item = (&RegretTrace, &AuditReport)> + '_ {
        self.traces
            .iter()
            .filter_map(|t| t.audit.as_ref().map(|a| (t, a)))
    }

    /// Writes results, summary, manifest and (optionally) objectives to `dir`.
    pub fn write(&self, dir: &std::path::Path) -> Result<()> {
        store::write_experiment(self, dir)
    }
}

/// Runs every (seed, policy) pair and, if `output_dir` is set, writes the results.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let grid = grid_for(config);
    let per_seed: Vec<(Replicate, Vec<RegretTrace>)> = (0..config.num_seeds as u64)
        .into_par_iter()
        .map(|seed| {
            let replicate = Replicate::new(config, &grid, seed);
            let traces = config
                .policies
                .iter()
                .map(|p| run_replicate(config, &grid, &replicate, p))
                .collect::<Result<Vec<_>>>()?;
            Ok((replicate, traces))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut replicates = Vec::with_capacity(per_seed.len());
    let mut objectives = Vec::with_capacity(per_seed.len());
    let mut traces = Vec::with_capacity(per_seed.len() * config.policies.len());
    for (rep, tr) in per_seed {
        replicates.push(rep.info());
        objectives.push(rep.objective);
        traces.extend(tr);
    }
    let kinds: Vec<PolicyKind> = config.policies.iter().map(|p| p.kind).collect();
    let aggregates = aggregate(&traces, &kinds, config.horizon);
    let result = ExperimentResult {
        config: config.clone(),
        replicates,
        objectives,
        traces,
        aggregates,
    };
    if let Some(dir) = &config.output_dir {
        result.write(dir)?;
    }
    Ok(result)
}
