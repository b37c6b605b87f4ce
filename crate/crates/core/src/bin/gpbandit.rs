use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gpbandit::algorithms::PolicyKind;
use gpbandit::harness::{
    certify_dir, run_experiment, CertifyOptions, ConfigOverrides, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "gpbandit", version, about = "Noise-free GP bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded multi-policy experiment and write results, summary and manifest.
    Run(RunArgs),
    /// Check posterior-deviation certificates on the traces of a finished run.
    Certify(CertifyArgs),
    /// Run GP-UCB with a grid-wide confidence bound audit at every step.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// se | matern
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    ell: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Comma-separated: ucb,ei,mvr,pe,uniform
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<PolicyKind>>,
    #[arg(long)]
    pe_batch: Option<usize>,
    /// exact-norm | upper-bound
    #[arg(long)]
    beta_mode: Option<String>,
    /// The bound B for --beta-mode upper-bound.
    #[arg(long)]
    beta_bound: Option<f64>,
    /// Terms in each sampled objective.
    #[arg(long)]
    objective_size: Option<usize>,
    #[arg(long)]
    save_objectives: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, audit: bool) -> gpbandit::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        ConfigOverrides {
            kernel: self.kernel,
            nu: self.nu,
            lengthscale: self.ell,
            grid_resolution: self.grid,
            dim: self.dim,
            horizon: self.horizon,
            num_seeds: self.seeds,
            master_seed: self.master_seed,
            policies: self.policies,
            pe_initial_batch: self.pe_batch,
            beta_mode: self.beta_mode,
            beta_bound: self.beta_bound,
            objective_size: self.objective_size,
            audit,
            save_objectives: self.save_objectives,
            output_dir: self.out,
        }
        .apply(&mut config)?;
        Ok(config)
    }
}

#[derive(Args)]
struct CertifyArgs {
    /// Directory written by `run`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [0.02, 0.05, 0.1, 0.3])]
    lambdas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<String>>,
    #[arg(long)]
    max_traces: Option<usize>,
}

fn run(cli: Cli) -> gpbandit::Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let config = args.into_config(false)?;
            let result = run_experiment(&config)?;
            let t = config.horizon;
            for p in &config.policies {
                let row = result
                    .aggregate_at(p.kind, t)
                    .expect("every policy is aggregated");
                println!(
                    "{:<8} R_{t} = {:.4} ± {:.4}   r_{t} = {:.3e} ± {:.1e}",
                    p.name(),
                    row.mean_cum_regret,
                    row.se_cum_regret,
                    row.mean_simple_regret,
                    row.se_simple_regret
                );
            }
            if let Some(dir) = &config.output_dir {
                println!("wrote {}", dir.display());
            }
            Ok(true)
        }
        Command::Certify(args) => {
            let options = CertifyOptions {
                lambdas: args.lambdas,
                policies: args.policies,
                max_traces: args.max_traces,
                ..Default::default()
            };
            let s = certify_dir(&args.out, &options)?;
            println!("certified {}/{} traces", s.passed, s.traces);
            println!(
                "schedule shape fits passing: {}/{}",
                s.schedule_passed, s.schedule_fits
            );
            println!(
                "elimination checks holding: {}/{}",
                s.elimination_held, s.elimination_checks
            );
            for (policy, seed) in &s.failed {
                println!("FAIL {policy} seed {seed}");
            }
            Ok(s.failed.is_empty())
        }
        Command::Verify(args) => {
            let mut config = args.into_config(true)?;
            if config.policies.iter().all(|p| p.kind != PolicyKind::Ucb) {
                config.policies = vec![gpbandit::algorithms::PolicyConfig::new(PolicyKind::Ucb)];
            }
            let result = run_experiment(&config)?;
            let mut ok = true;
            for (trace, audit) in result.audits() {
                let step_bound = trace.per_step_bound_violations(1e-6);
                if !audit.passed() || (trace.policy == PolicyKind::Ucb && !step_bound.is_empty()) {
                    ok = false;
                    println!(
                        "FAIL {} seed {}: {} grid violations, worst excess {:.3e} at step {}, {} per-step bound violations",
                        trace.policy,
                        trace.seed,
                        audit.violations,
                        audit.worst_excess,
                        audit.worst_at.0,
                        step_bound.len()
                    );
                }
            }
            let checks: usize = result.audits().map(|(_, a)| a.checks).sum();
            let worst = result
                .audits()
                .map(|(_, a)| a.worst_excess)
                .fold(f64::NEG_INFINITY, f64::max);
            println!(
                "{} confidence checks over {} traces, worst |f - mu| - B sigma = {worst:.3e}: {}",
                checks,
                result.traces.len(),
                if ok { "PASS" } else { "FAIL" }
            );
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
