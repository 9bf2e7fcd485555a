//! Model-based Nash value iteration with ε-greedy sampling, optionally with a
//! min-player exploiter table driving the behavior of the min side.

use super::{explore, policies_from_stage_solutions, uniform_pair, EmpiricalModel, EpsilonSchedule, EvalHook, LearnerState};
use crate::error::{Error, Result};
use crate::game::{GameDims, Simulator, TransitionSample};
use crate::matrix::{argmin, MatrixNashSolution};
use crate::oracle::QTable;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct NashViConfig {
    pub episodes: u64,
    pub schedule: EpsilonSchedule,
    /// Full re-estimate and sweep after every this many stored samples.
    pub update_interval: u64,
    pub gamma: f64,
}

impl NashViConfig {
    /// Constant ε = 0.5, a sweep every `100·H` samples, γ = 1.
    pub fn new(dims: GameDims, episodes: u64) -> Self {
        NashViConfig {
            episodes,
            schedule: EpsilonSchedule::constant(0.5).expect("valid epsilon"),
            update_interval: 100 * dims.horizon as u64,
            gamma: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.update_interval == 0 {
            return Err(Error::InvalidArgument("update interval must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        Ok(())
    }
}

struct ModelBasedLearner {
    dims: GameDims,
    gamma: f64,
    q: QTable,
    q_tilde: Option<QTable>,
    model: EmpiricalModel,
    /// Stage equilibria of `q`, one per `(h, s)`.
    nash: Vec<MatrixNashSolution>,
    /// Exploiter's pure reply to the main max-player policy, one per `(h, s)`.
    exploit_reply: Vec<usize>,
}

impl ModelBasedLearner {
    fn new(dims: GameDims, gamma: f64, with_exploiter: bool) -> Result<Self> {
        let q = QTable::zeros(dims);
        let mut learner = ModelBasedLearner {
            dims,
            gamma,
            q_tilde: with_exploiter.then(|| q.clone()),
            model: EmpiricalModel::new(dims),
            nash: Vec::with_capacity(dims.horizon * dims.states),
            exploit_reply: vec![0; dims.horizon * dims.states],
            q,
        };
        for h in 0..dims.horizon {
            for s in 0..dims.states {
                learner.nash.push(learner.q.stage_nash(h, s)?);
            }
        }
        Ok(learner)
    }

    /// Value of the min player's best pure reply to `μ̂[h][s]` under `Q̃`,
    /// together with that reply.
    fn exploit(&self, q_tilde: &QTable, h: usize, s: usize) -> (usize, f64) {
        let nb = self.dims.actions_min;
        let mu = self.nash[h * self.dims.states + s].row_strategy.probs();
        let block = q_tilde.block(h, s);
        let payoffs: Vec<f64> = (0..nb).map(|b| mu.iter().enumerate().map(|(a, p)| p * block[a * nb + b]).sum()).collect();
        let b = argmin(&payoffs);
        (b, payoffs[b])
    }

    /// Rebuilds `P̃, r̃` from the counts and recomputes every stage backward.
    fn sweep(&mut self) -> Result<()> {
        let GameDims {
            horizon,
            states,
            actions_max: na,
            actions_min: nb,
        } = self.dims;
        let mut p = vec![0.0; states];
        let mut v_nash = vec![0.0; states];
        let mut v_exploit = vec![0.0; states];
        for h in (0..horizon).rev() {
            let last = h + 1 == horizon;
            for s in 0..states {
                for a in 0..na {
                    for b in 0..nb {
                        let r = self.model.reward_estimate(h, s, a, b);
                        let (mut q, mut qt) = (r, r);
                        if !last {
                            self.model.transition_estimate(h, s, a, b, &mut p);
                            q += self.gamma * p.iter().zip(&v_nash).map(|(x, v)| x * v).sum::<f64>();
                            qt += self.gamma * p.iter().zip(&v_exploit).map(|(x, v)| x * v).sum::<f64>();
                        }
                        self.q.set(h, s, a, b, q);
                        if let Some(t) = self.q_tilde.as_mut() {
                            t.set(h, s, a, b, qt);
                        }
                    }
                }
            }
            for (s, v) in v_nash.iter_mut().enumerate() {
                let sol = self.q.stage_nash(h, s)?;
                *v = sol.value;
                self.nash[h * states + s] = sol;
            }
            if let Some(t) = self.q_tilde.take() {
                for (s, slot) in v_exploit.iter_mut().enumerate() {
                    let (b, v) = self.exploit(&t, h, s);
                    self.exploit_reply[h * states + s] = b;
                    *slot = v;
                }
                self.q_tilde = Some(t);
            }
        }
        Ok(())
    }

    fn act(&self, h: usize, s: usize, eps: f64, rng: &mut Rng) -> (usize, usize) {
        if explore(eps, rng) {
            return uniform_pair(self.dims, rng);
        }
        let stage = &self.nash[h * self.dims.states + s];
        let a = stage.row_strategy.sample(rng);
        let b = match self.q_tilde {
            Some(_) => self.exploit_reply[h * self.dims.states + s],
            None => stage.col_strategy.sample(rng),
        };
        (a, b)
    }

    fn into_state(self, episodes_seen: u64) -> LearnerState {
        LearnerState {
            q: self.q,
            q_tilde: self.q_tilde,
            model: Some(self.model),
            episodes_seen,
        }
    }
}

fn train(
    sim: Simulator<'_>,
    cfg: &NashViConfig,
    with_exploiter: bool,
    rng: &mut Rng,
    mut hook: Option<EvalHook<'_>>,
) -> Result<LearnerState> {
    cfg.validate()?;
    let dims = sim.dims();
    let mut learner = ModelBasedLearner::new(dims, cfg.gamma, with_exploiter)?;
    let mut stored = 0u64;
    let evaluate = |learner: &ModelBasedLearner, hook: &mut Option<EvalHook<'_>>, done: u64| -> Result<()> {
        if let Some(hook) = hook.as_mut().filter(|h| h.due(done)) {
            let (mu, nu) = policies_from_stage_solutions(dims, &learner.nash)?;
            (hook.callback)(done, &mu, &nu)?;
        }
        Ok(())
    };
    evaluate(&learner, &mut hook, 0)?;
    for k in 0..cfg.episodes {
        let eps = cfg.schedule.at(k);
        let mut s = sim.reset();
        for h in 0..dims.horizon {
            let (a, b) = learner.act(h, s, eps, rng);
            let out = sim.step(h, s, a, b, rng);
            learner.model.record(&TransitionSample {
                h,
                s,
                a,
                b,
                r: out.reward,
                done: out.done,
                s_next: out.next_state,
            });
            stored += 1;
            if stored.is_multiple_of(cfg.update_interval) {
                learner.sweep()?;
            }
            if out.done {
                break;
            }
            s = out.next_state;
        }
        evaluate(&learner, &mut hook, k + 1)?;
    }
    Ok(learner.into_state(cfg.episodes))
}

/// ε-greedy Nash value iteration. The learned pair is [`super::extract_policy`]
/// of the returned state.
pub fn nash_vi_train(sim: Simulator<'_>, cfg: &NashViConfig, rng: &mut Rng, hook: Option<EvalHook<'_>>) -> Result<LearnerState> {
    train(sim, cfg, false, rng, hook)
}

/// Nash value iteration whose min-player behavior is a pure best reply to the
/// main max-player policy under the exploiter table `Q̃`. The max-player half
/// of [`super::extract_policy`] is the deliverable.
pub fn nash_vi_exploiter_train(
    sim: Simulator<'_>,
    cfg: &NashViConfig,
    rng: &mut Rng,
    hook: Option<EvalHook<'_>>,
) -> Result<LearnerState> {
    train(sim, cfg, true, rng, hook)
}
