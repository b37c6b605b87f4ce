//! GP-UCB against the PE reconstruction, MVR and uniform sampling, written to disk.
//!
//! cargo run --release --example policy_comparison -- [seeds] [out-dir]

use gpbandit::algorithms::{PolicyConfig, PolicyKind};
use gpbandit::harness::{run_experiment, ExperimentConfig};
use gpbandit::KernelSpec;

fn main() -> gpbandit::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds = args.next().map_or(20, |s| s.parse().expect("seed count"));
    let out = args.next().map(std::path::PathBuf::from);
    let policies = [
        PolicyKind::Ucb,
        PolicyKind::Pe,
        PolicyKind::Mvr,
        PolicyKind::Uniform,
    ];

    for kernel in [
        KernelSpec::squared_exponential(0.25)?,
        KernelSpec::matern(1.5, 0.25)?,
        KernelSpec::matern(2.5, 0.25)?,
    ] {
        let config = ExperimentConfig {
            kernel,
            num_seeds: seeds,
            policies: policies.iter().map(|&k| PolicyConfig::new(k)).collect(),
            output_dir: out.as_ref().map(|d| d.join(kernel.label())),
            ..Default::default()
        };
        let result = run_experiment(&config)?;
        println!("{kernel}, {seeds} seeds, T = {}", config.horizon);
        for p in policies {
            let at = |t| result.aggregate_at(p, t).unwrap();
            println!(
                "  {:<8} R_50 = {:>8.3}  R_100 = {:>8.3}  R_200 = {:>8.3} ± {:.3}",
                p.name(),
                at(50).mean_cum_regret,
                at(100).mean_cum_regret,
                at(200).mean_cum_regret,
                at(200).se_cum_regret
            );
        }
    }
    if let Some(dir) = out {
        println!("results under {}", dir.display());
    }
    Ok(())
}
