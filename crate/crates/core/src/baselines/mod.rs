//! Best-response baselines: self-play, fictitious self-play and double oracle.
//!
//! Each iteration one side computes a best response to the other side's
//! current mixture, appends it to its policy set and updates its meta
//! strategy. Odd iterations train the max player, even ones the min player.

mod best_response;
mod meta;

pub use best_response::{
    best_response_to_strategy, q_learning_best_response, BestResponseConfig, BestResponseMethod, EarlyStop,
};

use best_response::best_response_counted;
pub use meta::{meta_nash, meta_payoffs, MetaEval};

use crate::error::{Error, Result};
use crate::game::TabularMG;
use crate::matrix::MixedStrategy;
use crate::policy::{MarkovPolicy, MixturePolicy, Player, Strategy};
use crate::rng::Rng;

/// Weights over the members of a [`PolicySet`].
pub type MetaStrategy = MixedStrategy;

/// The policies one player has accumulated so far, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySet {
    policies: Vec<MarkovPolicy>,
    owner: Player,
}

impl PolicySet {
    pub fn new(owner: Player, first: MarkovPolicy) -> Self {
        PolicySet {
            policies: vec![first],
            owner,
        }
    }

    pub fn from_policies(owner: Player, policies: Vec<MarkovPolicy>) -> Result<Self> {
        let first = policies.first().ok_or_else(|| Error::InvalidArgument("policy set must be nonempty".into()))?;
        if !policies.iter().all(|p| p.same_shape(first)) {
            return Err(Error::InvalidArgument("policy set members differ in shape".into()));
        }
        Ok(PolicySet { policies, owner })
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn policies(&self) -> &[MarkovPolicy] {
        &self.policies
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    pub fn push(&mut self, policy: MarkovPolicy) -> Result<()> {
        if !policy.same_shape(&self.policies[0]) {
            return Err(Error::InvalidArgument("policy does not match the set's shape".into()));
        }
        self.policies.push(policy);
        Ok(())
    }

    pub fn mixture(&self, meta: &MetaStrategy) -> Result<MixturePolicy> {
        MixturePolicy::new(self.policies.clone(), meta.clone())
    }

    /// `(set, meta)` as a deployable strategy, collapsed to a Markov policy
    /// when the meta strategy is one-hot.
    pub fn strategy(&self, meta: &MetaStrategy) -> Result<Strategy> {
        let mixture = self.mixture(meta)?;
        Ok(match mixture.as_single() {
            Some(p) => Strategy::Markov(p.clone()),
            None => Strategy::Mixture(mixture),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// Respond to the opponent's latest policy.
    SelfPlay,
    /// Respond to the uniform mixture of the opponent's history.
    FictitiousSelfPlay,
    /// Respond to the opponent's meta-Nash mixture.
    DoubleOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub iterations: u64,
    pub best_response: BestResponseConfig,
    /// Only used by double oracle.
    pub meta_eval: MetaEval,
}

impl BaselineConfig {
    pub fn new(iterations: u64) -> Self {
        BaselineConfig {
            iterations,
            best_response: BestResponseConfig::default(),
            meta_eval: MetaEval::MonteCarlo(100),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub max_set: PolicySet,
    pub max_meta: MetaStrategy,
    pub min_set: PolicySet,
    pub min_meta: MetaStrategy,
    /// Environment episodes spent in best-response phases.
    pub br_episodes: u64,
}

impl BaselineRun {
    pub fn max_strategy(&self) -> Result<Strategy> {
        self.max_set.strategy(&self.max_meta)
    }

    pub fn min_strategy(&self) -> Result<Strategy> {
        self.min_set.strategy(&self.min_meta)
    }
}

/// Called before the first iteration and after every iteration with the
/// best-response episodes consumed so far and both current strategies.
pub type BaselineHook<'a> = &'a mut dyn FnMut(u64, &Strategy, &Strategy) -> Result<()>;

pub fn self_play_train(game: &TabularMG, iterations: u64, br: &BestResponseConfig, rng: &mut Rng) -> Result<BaselineRun> {
    let cfg = BaselineConfig {
        best_response: br.clone(),
        ..BaselineConfig::new(iterations)
    };
    train_baseline(game, BaselineKind::SelfPlay, &cfg, rng, None)
}

pub fn fsp_train(game: &TabularMG, iterations: u64, br: &BestResponseConfig, rng: &mut Rng) -> Result<BaselineRun> {
    let cfg = BaselineConfig {
        best_response: br.clone(),
        ..BaselineConfig::new(iterations)
    };
    train_baseline(game, BaselineKind::FictitiousSelfPlay, &cfg, rng, None)
}

pub fn do_train(
    game: &TabularMG,
    iterations: u64,
    br: &BestResponseConfig,
    meta_eval: MetaEval,
    rng: &mut Rng,
) -> Result<BaselineRun> {
    let cfg = BaselineConfig {
        iterations,
        best_response: br.clone(),
        meta_eval,
    };
    train_baseline(game, BaselineKind::DoubleOracle, &cfg, rng, None)
}

pub fn train_baseline(
    game: &TabularMG,
    kind: BaselineKind,
    cfg: &BaselineConfig,
    rng: &mut Rng,
    mut hook: Option<BaselineHook<'_>>,
) -> Result<BaselineRun> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidArgument("baselines need at least one iteration".into()));
    }
    cfg.best_response.validate()?;
    cfg.meta_eval.validate()?;
    let dims = game.dims();
    let uniform = |player: Player| MarkovPolicy::uniform(dims.horizon, dims.states, player.num_actions(game));
    let mut run = BaselineRun {
        max_set: PolicySet::new(Player::Max, uniform(Player::Max)),
        max_meta: MetaStrategy::pure(1, 0),
        min_set: PolicySet::new(Player::Min, uniform(Player::Min)),
        min_meta: MetaStrategy::pure(1, 0),
        br_episodes: 0,
    };
    let mut report = |run: &BaselineRun| -> Result<()> {
        match hook.as_mut() {
            Some(cb) => cb(run.br_episodes, &run.max_strategy()?, &run.min_strategy()?),
            None => Ok(()),
        }
    };
    report(&run)?;
    for t in 1..=cfg.iterations {
        let learner = if t % 2 == 1 { Player::Max } else { Player::Min };
        let (opp_set, opp_meta) = match learner {
            Player::Max => (&run.min_set, &run.min_meta),
            Player::Min => (&run.max_set, &run.max_meta),
        };
        let opponent = Strategy::Mixture(opp_set.mixture(opp_meta)?);
        let (response, used) = best_response_counted(game, &opponent, opp_set.owner(), &cfg.best_response, rng)?;
        run.br_episodes += used;
        let (own_set, own_meta) = match learner {
            Player::Max => (&mut run.max_set, &mut run.max_meta),
            Player::Min => (&mut run.min_set, &mut run.min_meta),
        };
        own_set.push(response)?;
        let size = own_set.len();
        match kind {
            BaselineKind::SelfPlay => *own_meta = MetaStrategy::pure(size, size - 1),
            BaselineKind::FictitiousSelfPlay => *own_meta = MetaStrategy::uniform(size),
            BaselineKind::DoubleOracle => {
                let (x, y) = meta_nash(game, &run.max_set, &run.min_set, cfg.meta_eval, rng)?;
                run.max_meta = x;
                run.min_meta = y;
            }
        }
        report(&run)?;
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::generate_random_mg;
    use crate::matrix::PayoffMatrix;
    use crate::oracle::exploitability;
    use crate::rng::{stream_rng, Stream};

    fn pennies() -> TabularMG {
        TabularMG::single_stage(&PayoffMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()).unwrap()
    }

    fn gap(game: &TabularMG, run: &BaselineRun) -> f64 {
        exploitability(game, &run.max_strategy().unwrap(), &run.min_strategy().unwrap()).unwrap()
    }

    #[test]
    fn single_iteration_adds_one_max_policy() {
        let g = generate_random_mg(2, 2, 2, 2, 4).unwrap();
        let br = BestResponseConfig {
            episodes: 20,
            ..Default::default()
        };
        let sp = self_play_train(&g, 1, &br, &mut stream_rng(3, Stream::Learner)).unwrap();
        let fsp = fsp_train(&g, 1, &br, &mut stream_rng(3, Stream::Learner)).unwrap();
        assert_eq!((sp.max_set.len(), sp.min_set.len()), (2, 1));
        assert_eq!(sp.max_set, fsp.max_set);
        assert_eq!(sp.br_episodes, 20);
        let dob = do_train(&g, 1, &br, MetaEval::MonteCarlo(5), &mut stream_rng(3, Stream::Learner)).unwrap();
        assert_eq!((dob.max_set.len(), dob.min_set.len()), (2, 1));
    }

    #[test]
    fn meta_shapes_follow_the_scheme() {
        let g = generate_random_mg(2, 2, 2, 2, 4).unwrap();
        let cfg = BaselineConfig {
            best_response: BestResponseConfig {
                episodes: 10,
                ..Default::default()
            },
            ..BaselineConfig::new(5)
        };
        for kind in [BaselineKind::SelfPlay, BaselineKind::FictitiousSelfPlay, BaselineKind::DoubleOracle] {
            let mut sizes = Vec::new();
            let mut cb = |_: u64, x: &Strategy, y: &Strategy| {
                let n = |s: &Strategy| match s {
                    Strategy::Markov(_) => 1,
                    Strategy::Mixture(m) => m.components().len(),
                };
                sizes.push((n(x), n(y)));
                Ok(())
            };
            let run = train_baseline(&g, kind, &cfg, &mut stream_rng(0, Stream::Learner), Some(&mut cb)).unwrap();
            assert_eq!(sizes.len(), 6);
            assert!(run.max_set.len() <= 6 && run.min_set.len() <= 6);
            match kind {
                BaselineKind::SelfPlay => {
                    assert_eq!(run.max_meta.probs().iter().filter(|&&p| p == 1.0).count(), 1);
                    assert_eq!(run.max_meta.probs().last(), Some(&1.0));
                }
                BaselineKind::FictitiousSelfPlay => {
                    assert!(run.min_meta.probs().iter().all(|&p| (p - 1.0 / run.min_set.len() as f64).abs() < 1e-15));
                }
                BaselineKind::DoubleOracle => {
                    assert_eq!(run.max_meta.len(), run.max_set.len());
                    assert_eq!(run.min_meta.len(), run.min_set.len());
                }
            }
        }
    }

    #[test]
    fn self_play_cycles_on_matching_pennies() {
        let g = pennies();
        for t in [2, 7, 20] {
            let run = self_play_train(&g, t, &BestResponseConfig::exact(), &mut stream_rng(0, Stream::Learner)).unwrap();
            assert!((gap(&g, &run) - 2.0).abs() < 1e-9, "T = {t}");
        }
    }

    #[test]
    fn fictitious_play_approaches_equilibrium_on_matching_pennies() {
        let g = pennies();
        let run = fsp_train(&g, 50, &BestResponseConfig::exact(), &mut stream_rng(0, Stream::Learner)).unwrap();
        assert!(gap(&g, &run) < 0.5, "gap {}", gap(&g, &run));
    }

    #[test]
    fn double_oracle_solves_embedded_matrix_game() {
        let m = PayoffMatrix::from_rows(&[vec![0.2, -0.6, 0.9], vec![0.5, 0.1, -0.4], vec![-0.8, 0.7, 0.3]]).unwrap();
        let g = TabularMG::single_stage(&m).unwrap();
        let mut gaps = Vec::new();
        let cfg = BaselineConfig {
            iterations: 6,
            best_response: BestResponseConfig::exact(),
            meta_eval: MetaEval::Exact,
        };
        let mut cb = |_: u64, x: &Strategy, y: &Strategy| {
            gaps.push(exploitability(&g, x, y)?);
            Ok(())
        };
        train_baseline(&g, BaselineKind::DoubleOracle, &cfg, &mut stream_rng(0, Stream::Learner), Some(&mut cb)).unwrap();
        assert!(gaps.last().unwrap() <= &1e-6, "{gaps:?}");
    }

    #[test]
    fn trainers_are_reproducible() {
        let g = generate_random_mg(3, 2, 2, 2, 8).unwrap();
        let cfg = BaselineConfig {
            best_response: BestResponseConfig {
                episodes: 50,
                ..Default::default()
            },
            meta_eval: MetaEval::MonteCarlo(10),
            ..BaselineConfig::new(4)
        };
        for kind in [BaselineKind::SelfPlay, BaselineKind::FictitiousSelfPlay, BaselineKind::DoubleOracle] {
            let a = train_baseline(&g, kind, &cfg, &mut stream_rng(9, Stream::Learner), None).unwrap();
            let b = train_baseline(&g, kind, &cfg, &mut stream_rng(9, Stream::Learner), None).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = pennies();
        assert!(self_play_train(&g, 0, &BestResponseConfig::exact(), &mut stream_rng(0, Stream::Learner)).is_err());
    }
}
