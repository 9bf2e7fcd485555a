//! Single-agent best responses against a fixed (possibly mixed) opponent.

use std::collections::VecDeque;

use rand::Rng as _;

use super::{MetaStrategy, PolicySet};
use crate::error::{Error, Result};
use crate::game::TabularMG;
use crate::learners::EpsilonSchedule;
use crate::matrix::{argmax, argmin};
use crate::oracle::best_response_to_markov;
use crate::policy::{MarkovPolicy, MixturePolicy, Player, Strategy};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BestResponseMethod {
    /// ε-greedy tabular Q-learning from sampled episodes.
    QLearning,
    /// Dynamic programming on the known model. Only defined when the opponent
    /// is effectively Markov: a single supported component, or `H = 1`.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseConfig {
    /// Episodes per best-response phase.
    pub episodes: u64,
    pub alpha: f64,
    /// Indexed by the episode within the phase.
    pub schedule: EpsilonSchedule,
    pub gamma: f64,
    pub method: BestResponseMethod,
    /// Ends a Q-learning phase early once the responder's mean episodic
    /// return over the last `window` episodes exceeds `threshold`.
    pub early_stop: Option<EarlyStop>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStop {
    pub window: usize,
    pub threshold: f64,
}

impl Default for BestResponseConfig {
    fn default() -> Self {
        BestResponseConfig {
            episodes: 1000,
            alpha: 0.1,
            schedule: EpsilonSchedule::exponential(1.0, 0.0, 8000.0).expect("valid schedule"),
            gamma: 1.0,
            method: BestResponseMethod::QLearning,
            early_stop: None,
        }
    }
}

impl BestResponseConfig {
    pub fn exact() -> Self {
        BestResponseConfig {
            method: BestResponseMethod::Exact,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.method == BestResponseMethod::QLearning && self.episodes == 0 {
            return Err(Error::InvalidArgument("best-response episodes must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if let Some(stop) = self.early_stop {
            if stop.window == 0 || !stop.threshold.is_finite() {
                return Err(Error::InvalidArgument("early stop needs a positive window and a finite threshold".into()));
            }
        }
        Ok(())
    }
}

/// Best response to the mixture `(set, meta)`; the responder is the other
/// player.
pub fn q_learning_best_response(
    game: &TabularMG,
    set: &PolicySet,
    meta: &MetaStrategy,
    cfg: &BestResponseConfig,
    rng: &mut Rng,
) -> Result<MarkovPolicy> {
    let mixture = set.mixture(meta)?;
    best_response_to_strategy(game, &Strategy::Mixture(mixture), set.owner(), cfg, rng)
}

/// Best response to `opponent`, which is played by `owner`.
pub fn best_response_to_strategy(
    game: &TabularMG,
    opponent: &Strategy,
    owner: Player,
    cfg: &BestResponseConfig,
    rng: &mut Rng,
) -> Result<MarkovPolicy> {
    Ok(best_response_counted(game, opponent, owner, cfg, rng)?.0)
}

/// The response and the number of environment episodes it consumed.
pub(crate) fn best_response_counted(
    game: &TabularMG,
    opponent: &Strategy,
    owner: Player,
    cfg: &BestResponseConfig,
    rng: &mut Rng,
) -> Result<(MarkovPolicy, u64)> {
    cfg.validate()?;
    opponent.check_against(game, owner)?;
    match cfg.method {
        BestResponseMethod::QLearning => Ok(q_learning(game, opponent, owner, cfg, rng)),
        BestResponseMethod::Exact => {
            let markov = effective_markov(game, opponent)?;
            Ok((best_response_to_markov(game, &markov, owner)?.0, 0))
        }
    }
}

/// The Markov policy that behaves like `strategy`, when one exists.
fn effective_markov(game: &TabularMG, strategy: &Strategy) -> Result<MarkovPolicy> {
    let mixture = match strategy {
        Strategy::Markov(p) => return Ok(p.clone()),
        Strategy::Mixture(m) => m,
    };
    if let Some(p) = mixture.as_single() {
        return Ok(p.clone());
    }
    if game.horizon() == 1 {
        return averaged(mixture);
    }
    Err(Error::InvalidArgument(
        "exact best response to a multi-component mixture needs history; use Q-learning".into(),
    ))
}

fn averaged(mixture: &MixturePolicy) -> Result<MarkovPolicy> {
    let first = &mixture.components()[0];
    let mut probs = vec![0.0; first.horizon() * first.num_states() * first.num_actions()];
    for (policy, w) in mixture.support() {
        let mut i = 0;
        for h in 0..policy.horizon() {
            for s in 0..policy.num_states() {
                for &p in policy.dist(h, s) {
                    probs[i] += w * p;
                    i += 1;
                }
            }
        }
    }
    let n = first.num_actions();
    for chunk in probs.chunks_mut(n) {
        let total: f64 = chunk.iter().sum();
        chunk.iter_mut().for_each(|p| *p /= total);
    }
    MarkovPolicy::new(first.horizon(), first.num_states(), n, probs)
}

fn q_learning(
    game: &TabularMG,
    opponent: &Strategy,
    owner: Player,
    cfg: &BestResponseConfig,
    rng: &mut Rng,
) -> (MarkovPolicy, u64) {
    let responder = owner.opponent();
    let dims = game.dims();
    let n = responder.num_actions(game);
    let sim = game.simulator();
    let mut q = vec![0.0; dims.horizon * dims.states * n];
    let greedy = |row: &[f64]| match responder {
        Player::Max => argmax(row),
        Player::Min => argmin(row),
    };
    let sign = match responder {
        Player::Max => 1.0,
        Player::Min => -1.0,
    };
    let mut recent = VecDeque::new();
    let mut window_sum = 0.0;
    let mut used = 0;
    for k in 0..cfg.episodes {
        used = k + 1;
        let eps = cfg.schedule.at(k);
        let component = opponent.episode_policy(rng);
        let mut s = sim.reset();
        let mut ret = 0.0;
        let mut discount = 1.0;
        for h in 0..dims.horizon {
            let base = (h * dims.states + s) * n;
            let own = if rng.gen::<f64>() < eps {
                rng.gen_range(0..n)
            } else {
                greedy(&q[base..base + n])
            };
            let other = component.sample(h, s, rng);
            let (a, b) = match responder {
                Player::Max => (own, other),
                Player::Min => (other, own),
            };
            let out = sim.step(h, s, a, b, rng);
            ret += discount * out.reward;
            discount *= cfg.gamma;
            let mut target = out.reward;
            if !out.done {
                let next = ((h + 1) * dims.states + out.next_state) * n;
                let row = &q[next..next + n];
                target += cfg.gamma * row[greedy(row)];
            }
            let cell = &mut q[base + own];
            *cell = (1.0 - cfg.alpha) * *cell + cfg.alpha * target;
            if out.done {
                break;
            }
            s = out.next_state;
        }
        if let Some(stop) = cfg.early_stop {
            recent.push_back(sign * ret);
            window_sum += sign * ret;
            if recent.len() > stop.window {
                window_sum -= recent.pop_front().unwrap_or(0.0);
            }
            if recent.len() == stop.window && window_sum / stop.window as f64 > stop.threshold {
                break;
            }
        }
    }
    let choices: Vec<usize> = q.chunks(n).map(greedy).collect();
    let policy = MarkovPolicy::deterministic(dims.horizon, dims.states, n, &choices).expect("greedy choices are in range");
    (policy, used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::generate_random_mg;
    use crate::matrix::PayoffMatrix;
    use crate::oracle::policy_value;
    use crate::rng::{stream_rng, Stream};

    fn pennies() -> TabularMG {
        TabularMG::single_stage(&PayoffMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn learns_pure_counter_in_matching_pennies() {
        let g = pennies();
        let set = PolicySet::new(Player::Max, MarkovPolicy::deterministic(1, 1, 2, &[0]).unwrap());
        let meta = MetaStrategy::uniform(1);
        let cfg = BestResponseConfig {
            episodes: 10_000,
            ..Default::default()
        };
        let br = q_learning_best_response(&g, &set, &meta, &cfg, &mut stream_rng(0, Stream::Exploiter)).unwrap();
        assert_eq!(br.dist(0, 0), &[0.0, 1.0]);
    }

    #[test]
    fn early_stop_ends_phase_once_window_mean_clears_threshold() {
        let g = pennies();
        let opponent = Strategy::Markov(MarkovPolicy::deterministic(1, 1, 2, &[0]).unwrap());
        let cfg = BestResponseConfig {
            episodes: 10_000,
            schedule: EpsilonSchedule::exponential(1.0, 0.0, 50.0).unwrap(),
            early_stop: Some(EarlyStop {
                window: 20,
                threshold: 0.9,
            }),
            ..Default::default()
        };
        let (br, used) = best_response_counted(&g, &opponent, Player::Max, &cfg, &mut stream_rng(0, Stream::Exploiter)).unwrap();
        assert!((20..10_000).contains(&used), "{used}");
        assert_eq!(br.dist(0, 0), &[0.0, 1.0]);
        let plain = BestResponseConfig { early_stop: None, ..cfg };
        assert_eq!(best_response_counted(&g, &opponent, Player::Max, &plain, &mut stream_rng(0, Stream::Exploiter)).unwrap().1, 10_000);
    }

    #[test]
    fn alpha_zero_returns_lowest_index_everywhere() {
        let g = generate_random_mg(3, 2, 4, 3, 3).unwrap();
        let set = PolicySet::new(Player::Min, MarkovPolicy::uniform(3, 3, 4));
        let cfg = BestResponseConfig {
            episodes: 50,
            alpha: 0.0,
            ..Default::default()
        };
        let br = q_learning_best_response(&g, &set, &MetaStrategy::uniform(1), &cfg, &mut stream_rng(1, Stream::Exploiter))
            .unwrap();
        assert_eq!(br, MarkovPolicy::deterministic(3, 3, 2, &[0; 9]).unwrap());
    }

    #[test]
    fn learned_response_value_close_to_exact_on_deterministic_game() {
        let g = generate_random_mg(2, 2, 2, 2, 17).unwrap();
        let g = {
            let mut t = Vec::new();
            for h in 0..1 {
                for s in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            let mut row = vec![0.0; 2];
                            row[(h + s + a + b) % 2] = 1.0;
                            t.extend(row);
                        }
                    }
                }
            }
            let r: Vec<f64> = (0..2).flat_map(|h| (0..2).map(move |s| (h, s))).flat_map(|(h, s)| g.reward_block(h, s).to_vec()).collect();
            TabularMG::from_parts(g.dims(), 0, t, r, 1e-12).unwrap()
        };
        let nu = MarkovPolicy::new(2, 2, 2, vec![0.3, 0.7, 0.6, 0.4, 0.9, 0.1, 0.5, 0.5]).unwrap();
        let (_, exact) = best_response_to_markov(&g, &nu, Player::Min).unwrap();
        let cfg = BestResponseConfig {
            episodes: 20_000,
            alpha: 0.02,
            ..Default::default()
        };
        let opponent = Strategy::Markov(nu.clone());
        let br = best_response_to_strategy(&g, &opponent, Player::Min, &cfg, &mut stream_rng(5, Stream::Exploiter)).unwrap();
        let learned = policy_value(&g, &br, &nu).unwrap().get(0, 0);
        assert!((learned - exact.get(0, 0)).abs() <= 0.05, "{learned} vs {}", exact.get(0, 0));
    }

    #[test]
    fn exact_method_on_single_stage_mixture_uses_average() {
        let g = pennies();
        let set = PolicySet::from_policies(
            Player::Min,
            vec![
                MarkovPolicy::deterministic(1, 1, 2, &[0]).unwrap(),
                MarkovPolicy::deterministic(1, 1, 2, &[1]).unwrap(),
            ],
        )
        .unwrap();
        let meta = MetaStrategy::new(vec![0.3, 0.7]).unwrap();
        let br = q_learning_best_response(&g, &set, &meta, &BestResponseConfig::exact(), &mut stream_rng(0, Stream::Exploiter))
            .unwrap();
        assert_eq!(br.dist(0, 0), &[0.0, 1.0]);
    }

    #[test]
    fn exact_method_rejects_history_dependent_case() {
        let g = generate_random_mg(2, 2, 2, 2, 0).unwrap();
        let set = PolicySet::from_policies(
            Player::Min,
            vec![MarkovPolicy::uniform(2, 2, 2), MarkovPolicy::deterministic(2, 2, 2, &[1; 4]).unwrap()],
        )
        .unwrap();
        let meta = MetaStrategy::uniform(2);
        assert!(matches!(
            q_learning_best_response(&g, &set, &meta, &BestResponseConfig::exact(), &mut stream_rng(0, Stream::Exploiter)),
            Err(Error::InvalidArgument(_))
        ));
    }
}
