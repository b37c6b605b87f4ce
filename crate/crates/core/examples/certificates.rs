//! Posterior standard deviation certificates on a realized GP-UCB sequence.

use gpbandit::algorithms::{PolicyConfig, PolicyKind};
use gpbandit::harness::{grid_for, run_single, ExperimentConfig};
use gpbandit::theory_checks::{schedule_shape_check, ScheduleFamily, SequenceAnalysis};
use gpbandit::KernelSpec;

fn main() -> gpbandit::Result<()> {
    let config = ExperimentConfig {
        kernel: KernelSpec::matern(1.5, 0.25)?,
        ..Default::default()
    };
    let trace = run_single(&config, &PolicyConfig::new(PolicyKind::Ucb), 0)?;
    let points = grid_for(&config).select(&trace.chosen_indices());
    let analysis = SequenceAnalysis::new(config.kernel, points)?;
    let t = analysis.len();

    for lambda in [0.02, 0.05, 0.1, 0.3] {
        let c = analysis.elliptical_count(lambda);
        println!(
            "lambda = {lambda:<5} count = {:>3}  2 gain/ln2 = {:>7.2}  3 gain = {:>7.2}  holds = {}",
            c.count, c.bound, c.loose_bound, c.holds
        );
    }

    let c = analysis.lambda_certificate(t);
    println!(
        "\nmin sigma over {t} steps = {:.3e} <= lambda* = {:.3e}: {}",
        c.min_std, c.lambda_star, c.pass
    );

    let cum = analysis.cumulative_certificate(t);
    println!(
        "sum sigma = {:.4} <= (T_bar - 1) + sum lambda_t = {:.4} (T_bar = {}): {}",
        cum.lhs, cum.rhs, cum.t_bar, cum.pass
    );

    let fit = schedule_shape_check(ScheduleFamily::Matern, 2, 1.5, &cum.lambda_trace())?;
    println!(
        "lambda_t^2 ~ C t^(-1.5) (ln t)^1.5 with C = {:.4}, envelope x{:.2}, rms log residual {:.3}: {}",
        fit.schedule.constant, fit.envelope_multiplier, fit.rms_log_residual, fit.pass
    );
    Ok(())
}
