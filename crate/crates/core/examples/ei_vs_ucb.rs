//! Simple regret of expected improvement against GP-UCB on Matérn objectives.

use gpbandit::algorithms::{PolicyConfig, PolicyKind};
use gpbandit::harness::{run_experiment, ExperimentConfig};
use gpbandit::KernelSpec;

fn main() -> gpbandit::Result<()> {
    let seeds = std::env::args()
        .nth(1)
        .map_or(30, |s| s.parse().expect("seed count"));
    for nu in [1.5, 2.5] {
        let config = ExperimentConfig {
            kernel: KernelSpec::matern(nu, 0.25)?,
            num_seeds: seeds,
            policies: vec![
                PolicyConfig::new(PolicyKind::Ei),
                PolicyConfig::new(PolicyKind::Ucb),
            ],
            ..Default::default()
        };
        let result = run_experiment(&config)?;
        println!("Matérn nu = {nu}, {seeds} seeds");
        for t in [10, 25, 50, 100, 200] {
            let ei = result.aggregate_at(PolicyKind::Ei, t).unwrap();
            let ucb = result.aggregate_at(PolicyKind::Ucb, t).unwrap();
            println!(
                "  t = {t:>3}  r_t ei = {:.3e} ± {:.1e}   ucb = {:.3e} ± {:.1e}",
                ei.mean_simple_regret,
                ei.se_simple_regret,
                ucb.mean_simple_regret,
                ucb.se_simple_regret
            );
        }
    }
    Ok(())
}
