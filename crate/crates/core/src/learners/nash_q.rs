//! Model-free Nash Q-learning: each transition is folded into `Q[h][s][a][b]`
//! with a constant step size, bootstrapping on the stage equilibrium value of
//! the next step.

use super::{explore, uniform_pair, EpsilonSchedule, EvalHook, LearnerState};
use crate::error::{Error, Result};
use crate::game::{GameDims, Simulator};
use crate::matrix::MatrixNashSolution;
use crate::oracle::QTable;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct NashQConfig {
    pub episodes: u64,
    pub schedule: EpsilonSchedule,
    /// Step size in `[0, 1]`.
    pub alpha: f64,
    pub gamma: f64,
}

impl NashQConfig {
    /// Constant ε = 0.5, α = 0.1, γ = 1.
    pub fn new(episodes: u64) -> Self {
        NashQConfig {
            episodes,
            schedule: EpsilonSchedule::constant(0.5).expect("valid epsilon"),
            alpha: 0.1,
            gamma: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        Ok(())
    }
}

/// Stage equilibria of a Q-table, recomputed lazily after writes.
struct NashCache {
    states: usize,
    entries: Vec<Option<MatrixNashSolution>>,
}

impl NashCache {
    fn new(dims: GameDims) -> Self {
        NashCache {
            states: dims.states,
            entries: vec![None; dims.horizon * dims.states],
        }
    }

    fn get(&mut self, q: &QTable, h: usize, s: usize) -> Result<&MatrixNashSolution> {
        let slot = &mut self.entries[h * self.states + s];
        if slot.is_none() {
            *slot = Some(q.stage_nash(h, s)?);
        }
        Ok(slot.as_ref().expect("filled above"))
    }

    fn invalidate(&mut self, h: usize, s: usize) {
        self.entries[h * self.states + s] = None;
    }
}

pub fn nash_q_learning_train(
    sim: Simulator<'_>,
    cfg: &NashQConfig,
    rng: &mut Rng,
    mut hook: Option<EvalHook<'_>>,
) -> Result<LearnerState> {
    cfg.validate()?;
    let dims = sim.dims();
    let mut q = QTable::zeros(dims);
    let mut cache = NashCache::new(dims);
    let mut evaluate = |q: &QTable, done: u64| -> Result<()> {
        if let Some(hook) = hook.as_mut().filter(|h| h.due(done)) {
            let (mu, nu) = q.nash_policies()?;
            (hook.callback)(done, &mu, &nu)?;
        }
        Ok(())
    };
    evaluate(&q, 0)?;
    for k in 0..cfg.episodes {
        let eps = cfg.schedule.at(k);
        let mut s = sim.reset();
        for h in 0..dims.horizon {
            let (a, b) = if explore(eps, rng) {
                uniform_pair(dims, rng)
            } else {
                let stage = cache.get(&q, h, s)?;
                (stage.row_strategy.sample(rng), stage.col_strategy.sample(rng))
            };
            let out = sim.step(h, s, a, b, rng);
            let target = if out.done {
                out.reward
            } else {
                out.reward + cfg.gamma * cache.get(&q, h + 1, out.next_state)?.value
            };
            let old = q.get(h, s, a, b);
            q.set(h, s, a, b, (1.0 - cfg.alpha) * old + cfg.alpha * target);
            cache.invalidate(h, s);
            if out.done {
                break;
            }
            s = out.next_state;
        }
        evaluate(&q, k + 1)?;
    }
    Ok(LearnerState {
        q,
        q_tilde: None,
        model: None,
        episodes_seen: cfg.episodes,
    })
}
