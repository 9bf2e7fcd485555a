//! Exploitability measurement during and after training.

use crate::baselines::{best_response_to_strategy, BestResponseConfig};
use crate::error::{Error, Result};
use crate::game::{rollout, TabularMG};
use crate::learners::EpsilonSchedule;
use crate::oracle::exploitability_with_budget;
use crate::policy::{Player, Strategy};
use crate::rng::{substream, Rng, Stream};

use super::config::EvalMode;

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxConfig {
    /// Q-learning episodes per exploiter.
    pub exploiter_episodes: u64,
    /// Rollouts per Monte-Carlo value estimate.
    pub eval_episodes: u64,
    pub alpha: f64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            exploiter_episodes: 5000,
            eval_episodes: 10_000,
            alpha: 0.1,
        }
    }
}

impl ApproxConfig {
    fn exploiter(&self, gamma: f64) -> Result<BestResponseConfig> {
        Ok(BestResponseConfig {
            episodes: self.exploiter_episodes,
            alpha: self.alpha,
            schedule: EpsilonSchedule::exponential(1.0, 0.05, (self.exploiter_episodes as f64 / 3.0).max(1.0))?,
            gamma,
            ..BestResponseConfig::default()
        })
    }
}

/// `V̂^{†,ν̂} − V̂^{μ̂,†}` with a freshly trained Q-learning exploiter per side,
/// each value estimated by Monte-Carlo rollouts.
pub fn approx_exploitability(game: &TabularMG, mu: &Strategy, nu: &Strategy, cfg: &ApproxConfig, rng: &mut Rng) -> Result<f64> {
    if cfg.eval_episodes == 0 {
        return Err(Error::InvalidArgument("evaluation needs at least one episode".into()));
    }
    let br_cfg = cfg.exploiter(game.gamma())?;
    let vs_nu = best_response_to_strategy(game, nu, Player::Min, &br_cfg, rng)?;
    let vs_mu = best_response_to_strategy(game, mu, Player::Max, &br_cfg, rng)?;
    let mut upper = 0.0;
    let mut lower = 0.0;
    for _ in 0..cfg.eval_episodes {
        upper += rollout(game, &vs_nu, nu.episode_policy(rng), rng)?.ret;
        lower += rollout(game, mu.episode_policy(rng), &vs_mu, rng)?.ret;
    }
    Ok((upper - lower) / cfg.eval_episodes as f64)
}

/// Measures exploitability at each logging point of one run.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub game: &'a TabularMG,
    pub mode: EvalMode,
    pub node_budget: usize,
    pub approx: ApproxConfig,
    /// Seeds the per-evaluation exploiter streams.
    pub seed: u64,
    evaluations: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(game: &'a TabularMG, mode: EvalMode, node_budget: usize, approx: ApproxConfig, seed: u64) -> Self {
        Evaluator {
            game,
            mode,
            node_budget,
            approx,
            seed,
            evaluations: 0,
        }
    }

    /// Exact exploitability when the mode asks for it and the mixture search
    /// fits the node budget; otherwise the approximate estimate.
    pub fn evaluate(&mut self, mu: &Strategy, nu: &Strategy) -> Result<f64> {
        let index = self.evaluations;
        self.evaluations += 1;
        if self.mode == EvalMode::Exact {
            match exploitability_with_budget(self.game, mu, nu, self.node_budget) {
                Err(Error::HistoryBudgetExceeded { .. }) => {}
                other => return other,
            }
        }
        let mut rng = substream(self.seed, Stream::Exploiter, index);
        approx_exploitability(self.game, mu, nu, &self.approx, &mut rng)
    }
}
