//! Experiment plumbing behind the command-line tool: environment files,
//! training runs with periodic exploitability logging, comparisons with
//! plots, exploitability evaluation of saved policies and solver timing.

mod bench;
mod config;
mod evaluate;
mod log;
mod plot;
mod runner;

pub use bench::{bench_solvers, BenchReport, SolverStats};
pub use config::{Algorithm, EnvSource, EvalMode, ExperimentConfig};
pub use evaluate::{approx_exploitability, ApproxConfig, Evaluator};
pub use log::{smooth_trailing, LogRow, RunLog, CSV_HEADER};
pub use plot::{bands, median_episodes_to_reach, render_svg, Band, PlotOptions};
pub use runner::{load_environment, merge_logs, run_all, run_single, RunOutcome, THREADS_ENV};

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::game::{generate_random_mg, TabularMG};
use crate::oracle::{exact_nash_solve, exploitability_with_budget};
use crate::policy::PolicyPair;
use crate::rng::{stream_rng, Stream};

/// Writes a random environment to `out`.
pub fn cmd_generate_env(states: usize, actions_max: usize, actions_min: usize, horizon: usize, seed: u64, out: &Path) -> Result<()> {
    generate_random_mg(states, actions_max, actions_min, horizon, seed)?.save(out)
}

/// Solves the environment at `env_path`, writes the equilibrium pair to
/// `policy_out` and returns the game value at the initial state.
pub fn cmd_solve_exact(env_path: &Path, policy_out: &Path) -> Result<f64> {
    let game = TabularMG::load(env_path)?;
    let sol = exact_nash_solve(&game)?;
    let value = sol.value(&game);
    PolicyPair::new(sol.mu_star, sol.nu_star).save(policy_out)?;
    Ok(value)
}

/// Files written by a training or comparison command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub policies: Vec<PathBuf>,
    pub log: RunLog,
}

fn artifact_dir(cfg: &ExperimentConfig, base: &Path) -> Result<PathBuf> {
    let dir = match &cfg.output_dir {
        Some(d) => base.join(d),
        None => base.to_path_buf(),
    };
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn save_policies(outcomes: &[RunOutcome], dir: &Path) -> Result<Vec<PathBuf>> {
    outcomes
        .iter()
        .map(|o| {
            let path = dir.join(format!("{}_seed{}_policy.json", o.algorithm, o.seed));
            o.policy.save(&path)?;
            Ok(path)
        })
        .collect()
}

/// Trains the configured algorithm for every seed, writing `<algorithm>.csv`
/// and one policy file per seed.
pub fn cmd_train(cfg: &ExperimentConfig, base: &Path) -> Result<Artifacts> {
    let &[algorithm] = cfg.algorithms.as_slice() else {
        return Err(Error::Config("train takes exactly one algorithm; use compare for several".into()));
    };
    let game = load_environment(cfg, base)?;
    let dir = artifact_dir(cfg, base)?;
    let outcomes = run_all(&game, cfg)?;
    let log = merge_logs(&outcomes);
    let csv = dir.join(format!("{algorithm}.csv"));
    log.save(&csv)?;
    let policies = save_policies(&outcomes, &dir)?;
    Ok(Artifacts {
        csv,
        svg: None,
        policies,
        log,
    })
}

/// Runs every configured algorithm on the same environment and seeds,
/// writing `compare.csv`, `compare.svg` and the final policies.
pub fn cmd_compare(cfg: &ExperimentConfig, base: &Path) -> Result<Artifacts> {
    let game = load_environment(cfg, base)?;
    let dir = artifact_dir(cfg, base)?;
    let outcomes = run_all(&game, cfg)?;
    let log = merge_logs(&outcomes);
    let csv = dir.join("compare.csv");
    log.save(&csv)?;
    let svg = dir.join("compare.svg");
    let opts = PlotOptions {
        log_scale: cfg.log_scale,
        smoothing_window: (cfg.eval_mode == EvalMode::ApproxExploiter).then_some(cfg.smoothing_window),
        title: format!("exploitability, {} seed(s)", cfg.seeds.len()),
    };
    std::fs::write(&svg, render_svg(&log, &opts))?;
    let policies = save_policies(&outcomes, &dir)?;
    Ok(Artifacts {
        csv,
        svg: Some(svg),
        policies,
        log,
    })
}

/// Settings for evaluating a saved policy pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploitEvalOptions {
    pub mode: EvalMode,
    pub node_budget: usize,
    pub approx: ApproxConfig,
    pub seed: u64,
}

/// Exploitability of the policy pair stored at `policy_path`. Exact mode
/// reports budget overruns as errors instead of falling back.
pub fn cmd_exploit_eval(policy_path: &Path, env_path: &Path, opts: &ExploitEvalOptions) -> Result<f64> {
    let game = TabularMG::load(env_path)?;
    let pair = PolicyPair::load(policy_path)?;
    pair.check_against(&game)?;
    match opts.mode {
        EvalMode::Exact => exploitability_with_budget(&game, &pair.max_player, &pair.min_player, opts.node_budget),
        EvalMode::ApproxExploiter => {
            let mut rng = stream_rng(opts.seed, Stream::Exploiter);
            approx_exploitability(&game, &pair.max_player, &pair.min_player, &opts.approx, &mut rng)
        }
    }
}
