//! Runs configured algorithms and records their exploitability over time.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{Algorithm, EnvSource, ExperimentConfig};
use super::evaluate::{ApproxConfig, Evaluator};
use super::log::{LogRow, RunLog};
use crate::baselines::{train_baseline, BaselineConfig, BaselineKind, BestResponseConfig, EarlyStop, MetaEval};
use crate::error::{Error, Result};
use crate::game::{generate_random_mg, TabularMG};
use crate::learners::{
    extract_policy, nash_q_learning_train, nash_vi_exploiter_train, nash_vi_train, EvalHook, NashQConfig, NashViConfig,
};
use crate::policy::{MarkovPolicy, PolicyPair, Strategy};
use crate::rng::{stream_rng, Stream};

/// Environment variable capping worker threads for multi-run commands.
pub const THREADS_ENV: &str = "NASHMG_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub rows: Vec<LogRow>,
    pub policy: PolicyPair,
}

/// Loads or generates the configured environment; relative files are
/// resolved against `base`.
pub fn load_environment(cfg: &ExperimentConfig, base: &Path) -> Result<TabularMG> {
    let game = match &cfg.env {
        EnvSource::File(path) => TabularMG::load(&base.join(path))?,
        &EnvSource::Generate {
            states,
            actions_max,
            actions_min,
            horizon,
            seed,
        } => generate_random_mg(states, actions_max, actions_min, horizon, seed)?,
    };
    match cfg.gamma {
        Some(g) => game.with_gamma(g),
        None => Ok(game),
    }
}

fn approx_config(cfg: &ExperimentConfig) -> ApproxConfig {
    ApproxConfig {
        exploiter_episodes: cfg.exploiter_episodes,
        eval_episodes: cfg.exploiter_eval_episodes,
        alpha: cfg.alpha,
    }
}

/// Trains `algorithm` with `seed`, logging exploitability at episode 0 and
/// then every `eval_every` episodes (after every iteration for baselines).
pub fn run_single(game: &TabularMG, algorithm: Algorithm, cfg: &ExperimentConfig, seed: u64) -> Result<RunOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let mut evaluator = Evaluator::new(game, cfg.eval_mode, cfg.node_budget, approx_config(cfg), seed);
    let mut rows = Vec::new();
    let mut record = |episode: u64, mu: &Strategy, nu: &Strategy| -> Result<()> {
        let exploitability = evaluator.evaluate(mu, nu)?;
        rows.push(LogRow {
            algorithm,
            seed,
            episode,
            exploitability,
            wall_time_ms: if cfg.record_wall_time { start.elapsed().as_millis() as u64 } else { 0 },
        });
        Ok(())
    };
    let mut rng = stream_rng(seed, Stream::Learner);
    let dims = game.dims();
    let policy = match algorithm {
        Algorithm::NashVi | Algorithm::NashViExploiter | Algorithm::NashQ => {
            let mut cb = |k: u64, mu: &MarkovPolicy, nu: &MarkovPolicy| {
                record(k, &Strategy::Markov(mu.clone()), &Strategy::Markov(nu.clone()))
            };
            let hook = Some(EvalHook {
                every: cfg.eval_every,
                callback: &mut cb,
            });
            let state = if algorithm == Algorithm::NashQ {
                let learner_cfg = NashQConfig {
                    episodes: cfg.episodes,
                    schedule: cfg.schedule.unwrap_or(NashQConfig::new(0).schedule),
                    alpha: cfg.alpha,
                    gamma: game.gamma(),
                };
                nash_q_learning_train(game.simulator(), &learner_cfg, &mut rng, hook)?
            } else {
                let defaults = NashViConfig::new(dims, cfg.episodes);
                let learner_cfg = NashViConfig {
                    schedule: cfg.schedule.unwrap_or(defaults.schedule),
                    update_interval: cfg.update_interval.unwrap_or(defaults.update_interval),
                    gamma: game.gamma(),
                    ..defaults
                };
                if algorithm == Algorithm::NashVi {
                    nash_vi_train(game.simulator(), &learner_cfg, &mut rng, hook)?
                } else {
                    nash_vi_exploiter_train(game.simulator(), &learner_cfg, &mut rng, hook)?
                }
            };
            let (mu, nu) = extract_policy(&state)?;
            PolicyPair::new(mu, nu)
        }
        Algorithm::SelfPlay | Algorithm::Fsp | Algorithm::DoubleOracle => {
            let iterations = cfg.episodes / cfg.br_episodes;
            if iterations == 0 {
                let mu = MarkovPolicy::uniform(dims.horizon, dims.states, dims.actions_max);
                let nu = MarkovPolicy::uniform(dims.horizon, dims.states, dims.actions_min);
                record(0, &Strategy::Markov(mu.clone()), &Strategy::Markov(nu.clone()))?;
                PolicyPair::new(mu, nu)
            } else {
                let kind = match algorithm {
                    Algorithm::SelfPlay => BaselineKind::SelfPlay,
                    Algorithm::Fsp => BaselineKind::FictitiousSelfPlay,
                    _ => BaselineKind::DoubleOracle,
                };
                let baseline_cfg = BaselineConfig {
                    iterations,
                    best_response: BestResponseConfig {
                        episodes: cfg.br_episodes,
                        alpha: cfg.alpha,
                        gamma: game.gamma(),
                        early_stop: cfg.br_early_stop.map(|(window, threshold)| EarlyStop { window, threshold }),
                        ..BestResponseConfig::default()
                    },
                    meta_eval: MetaEval::MonteCarlo(cfg.meta_eval_episodes),
                };
                let run = train_baseline(game, kind, &baseline_cfg, &mut rng, Some(&mut record))?;
                PolicyPair {
                    max_player: run.max_strategy()?,
                    min_player: run.min_strategy()?,
                }
            }
        }
    };
    Ok(RunOutcome {
        algorithm,
        seed,
        rows,
        policy,
    })
}

/// Every configured `(algorithm, seed)` pair, run concurrently; outcomes come
/// back sorted by algorithm then seed.
pub fn run_all(game: &TabularMG, cfg: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    let jobs: Vec<(Algorithm, u64)> = cfg
        .algorithms
        .iter()
        .flat_map(|&a| cfg.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let work = || jobs.par_iter().map(|&(a, s)| run_single(game, a, cfg, s)).collect::<Result<Vec<_>>>();
    let mut outcomes = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvariantViolation(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    outcomes.sort_by_key(|o| (o.algorithm, o.seed));
    Ok(outcomes)
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Rows of all outcomes merged into one log in `(algorithm, seed, episode)`
/// order.
pub fn merge_logs(outcomes: &[RunOutcome]) -> RunLog {
    let mut log = RunLog::new(outcomes.iter().flat_map(|o| o.rows.iter().cloned()).collect());
    log.sort();
    log
}
