use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{PolicyConfig, PolicyKind};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Smoothness};

/// How the confidence width `beta^{1/2}` is chosen for each objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    /// The exact RKHS norm of the sampled objective.
    ExactNorm,
    /// A fixed bound `B`, shared across objectives.
    UpperBound(f64),
}

impl BetaMode {
    pub fn beta_sqrt(&self, exact_norm: f64) -> f64 {
        match *self {
            BetaMode::ExactNorm => exact_norm,
            BetaMode::UpperBound(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kernel: KernelSpec,
    /// Grid points per axis.
    pub grid_resolution: usize,
    pub dim: usize,
    pub horizon: usize,
    pub num_seeds: usize,
    pub master_seed: u64,
    pub policies: Vec<PolicyConfig>,
    /// Number of terms in each sampled kernel expansion.
    pub objective_size: usize,
    pub beta_mode: BetaMode,
    /// Check the confidence bound over the whole grid at every step.
    pub audit: bool,
    pub save_objectives: bool,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kernel: KernelSpec::SquaredExponential { lengthscale: 0.25 },
            grid_resolution: 25,
            dim: 2,
            horizon: 200,
            num_seeds: 100,
            master_seed: 0,
            policies: vec![
                PolicyConfig::new(PolicyKind::Ucb),
                PolicyConfig::new(PolicyKind::Pe),
                PolicyConfig::new(PolicyKind::Uniform),
            ],
            objective_size: 50,
            beta_mode: BetaMode::ExactNorm,
            audit: false,
            save_objectives: false,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.horizon < 1 {
            return bad("horizon must be >= 1".into());
        }
        if self.grid_resolution < 2 {
            return bad("grid resolution must be >= 2".into());
        }
        if self.dim < 1 {
            return bad("dimension must be >= 1".into());
        }
        if self.num_seeds < 1 {
            return bad("num_seeds must be >= 1".into());
        }
        if self.objective_size < 1 {
            return bad("objective_size must be >= 1".into());
        }
        if self.policies.is_empty() {
            return bad("at least one policy is required".into());
        }
        if let BetaMode::UpperBound(b) = self.beta_mode {
            if !b.is_finite() || b < 0.0 {
                return bad(format!(
                    "beta bound must be finite and non-negative (got {b})"
                ));
            }
        }
        let grid_points = (self.grid_resolution as f64).powi(self.dim as i32);
        if grid_points > 1e7 {
            return bad(format!("grid of {grid_points} points is too large"));
        }
        for (i, p) in self.policies.iter().enumerate() {
            p.validate()?;
            if self.policies[..i].iter().any(|q| q.kind == p.kind) {
                return bad(format!("policy `{}` listed twice", p.name()));
            }
        }
        Ok(())
    }

    pub fn num_candidates(&self) -> usize {
        self.grid_resolution.pow(self.dim as u32)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

/// Command-line style overrides applied on top of a base configuration.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    /// `"se"` or `"matern"`.
    pub kernel: Option<String>,
    pub nu: Option<f64>,
    pub lengthscale: Option<f64>,
    pub grid_resolution: Option<usize>,
    pub dim: Option<usize>,
    pub horizon: Option<usize>,
    pub num_seeds: Option<usize>,
    pub master_seed: Option<u64>,
    pub policies: Option<Vec<PolicyKind>>,
    pub pe_initial_batch: Option<usize>,
    /// `"exact-norm"` or `"upper-bound"`.
    pub beta_mode: Option<String>,
    pub beta_bound: Option<f64>,
    pub objective_size: Option<usize>,
    pub audit: bool,
    pub save_objectives: bool,
    pub output_dir: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        let family = self.kernel.clone().unwrap_or_else(|| match config.kernel {
            KernelSpec::SquaredExponential { .. } => "se".into(),
            KernelSpec::Matern { .. } => "matern".into(),
        });
        let ell = self.lengthscale.unwrap_or(config.kernel.lengthscale());
        config.kernel = match family.to_ascii_lowercase().as_str() {
            "se" => {
                if self.nu.is_some() {
                    return Err(Error::InvalidConfig(
                        "--nu only applies to the Matérn kernel".into(),
                    ));
                }
                KernelSpec::squared_exponential(ell)?
            }
            "matern" => {
                let nu = self
                    .nu
                    .or(config.kernel.smoothness().map(Smoothness::value))
                    .ok_or_else(|| {
                        Error::InvalidConfig(
                            "the Matérn kernel needs --nu (0.5, 1.5 or 2.5)".into(),
                        )
                    })?;
                KernelSpec::matern(nu, ell)?
            }
            other => return Err(Error::InvalidConfig(format!("unknown kernel `{other}`"))),
        };
        if let Some(v) = self.grid_resolution {
            config.grid_resolution = v;
        }
        if let Some(v) = self.dim {
            config.dim = v;
        }
        if let Some(v) = self.horizon {
            config.horizon = v;
        }
        if let Some(v) = self.num_seeds {
            config.num_seeds = v;
        }
        if let Some(v) = self.master_seed {
            config.master_seed = v;
        }
        if let Some(kinds) = &self.policies {
            config.policies = kinds.iter().map(|&k| PolicyConfig::new(k)).collect();
        }
        if let Some(b) = self.pe_initial_batch {
            for p in &mut config.policies {
                p.pe_initial_batch = b;
            }
        }
        match self.beta_mode.as_deref() {
            None => {
                if let Some(b) = self.beta_bound {
                    config.beta_mode = BetaMode::UpperBound(b);
                }
            }
            Some("exact-norm") | Some("exact_norm") | Some("exact") => {
                config.beta_mode = BetaMode::ExactNorm
            }
            Some("upper-bound") | Some("upper_bound") | Some("bound") => {
                let b = self.beta_bound.or(match config.beta_mode {
                    BetaMode::UpperBound(b) => Some(b),
                    BetaMode::ExactNorm => None,
                });
                config.beta_mode = BetaMode::UpperBound(b.ok_or_else(|| {
                    Error::InvalidConfig("--beta-mode upper-bound needs --beta-bound".into())
                })?);
            }
            Some(other) => {
                return Err(Error::InvalidConfig(format!("unknown beta mode `{other}`")))
            }
        }
        if let Some(m) = self.objective_size {
            config.objective_size = m;
        }
        config.audit |= self.audit;
        config.save_objectives |= self.save_objectives;
        if let Some(dir) = &self.output_dir {
            config.output_dir = Some(dir.clone());
        }
        config.validate()
    }
}
