//! Grid-wide check of |f - mu| <= B sigma at every step of GP-UCB runs.

use gpbandit::algorithms::{PolicyConfig, PolicyKind};
use gpbandit::harness::{run_experiment, BetaMode, ExperimentConfig};
use gpbandit::KernelSpec;

fn main() -> gpbandit::Result<()> {
    for kernel in [
        KernelSpec::squared_exponential(0.25)?,
        KernelSpec::matern(0.5, 0.25)?,
    ] {
        let config = ExperimentConfig {
            kernel,
            num_seeds: 10,
            policies: vec![PolicyConfig::new(PolicyKind::Ucb)],
            beta_mode: BetaMode::ExactNorm,
            audit: true,
            ..Default::default()
        };
        let result = run_experiment(&config)?;
        for (trace, audit) in result.audits() {
            println!(
                "{kernel} seed {}: {} checks, worst |f-mu| - B sigma = {:+.2e} at step {}, index {}",
                trace.seed, audit.checks, audit.worst_excess, audit.worst_at.0, audit.worst_at.1
            );
            if let Some(e) = audit.to_error() {
                println!("  {e}");
            }
        }
    }
    Ok(())
}
