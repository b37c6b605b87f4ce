//! One GP-UCB run on a 25x25 grid with beta^{1/2} set to the exact norm.

use gpbandit::algorithms::{PolicyConfig, PolicyKind};
use gpbandit::harness::{run_single, ExperimentConfig};

fn main() -> gpbandit::Result<()> {
    let config = ExperimentConfig {
        horizon: 60,
        ..Default::default()
    };
    let trace = run_single(&config, &PolicyConfig::new(PolicyKind::Ucb), 0)?;
    println!(
        "B = {:.4}, f* = {:.4} at grid index {}",
        trace.norm, trace.f_star, trace.x_star_index
    );
    println!(
        "{:>4} {:>6} {:>10} {:>10} {:>10} {:>10}",
        "t", "index", "f(x_t)", "R_t", "r_t", "sigma"
    );
    for s in trace.steps.iter().filter(|s| s.t <= 10 || s.t % 10 == 0) {
        println!(
            "{:>4} {:>6} {:>10.5} {:>10.5} {:>10.2e} {:>10.2e}",
            s.t, s.chosen_index, s.f_value, s.cum_regret, s.simple_regret, s.prior_std
        );
    }
    println!(
        "per-step bound violations: {}",
        trace.per_step_bound_violations(1e-6).len()
    );
    Ok(())
}
