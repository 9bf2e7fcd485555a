//! Equilibrium learners that only interact with the game through a
//! [`Simulator`](crate::game::Simulator).

mod model;
mod nash_q;
mod nash_vi;
mod schedule;

pub use model::EmpiricalModel;
pub use nash_q::{nash_q_learning_train, NashQConfig};
pub use nash_vi::{nash_vi_exploiter_train, nash_vi_train, NashViConfig};
pub use schedule::{EpsilonSchedule, ScheduleMode};

use rand::Rng as _;

use crate::error::Result;
use crate::game::GameDims;
use crate::matrix::MatrixNashSolution;
use crate::oracle::QTable;
use crate::policy::MarkovPolicy;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub q: QTable,
    /// Exploiter table, present only for the exploiter variant.
    pub q_tilde: Option<QTable>,
    /// Empty for model-free learners.
    pub model: Option<EmpiricalModel>,
    pub episodes_seen: u64,
}

/// Per-stage equilibria of `state.q` as a policy pair.
pub fn extract_policy(state: &LearnerState) -> Result<(MarkovPolicy, MarkovPolicy)> {
    state.q.nash_policies()
}

/// Periodic evaluation callback, called with the number of completed episodes
/// (starting at 0) and the learner's current policy pair.
pub struct EvalHook<'a> {
    pub every: u64,
    pub callback: &'a mut dyn FnMut(u64, &MarkovPolicy, &MarkovPolicy) -> Result<()>,
}

impl EvalHook<'_> {
    fn due(&self, episodes_done: u64) -> bool {
        self.every > 0 && episodes_done.is_multiple_of(self.every)
    }
}

fn policies_from_stage_solutions(dims: GameDims, stages: &[MatrixNashSolution]) -> Result<(MarkovPolicy, MarkovPolicy)> {
    let rows = stages.iter().map(|s| s.row_strategy.clone()).collect();
    let cols = stages.iter().map(|s| s.col_strategy.clone()).collect();
    Ok((
        MarkovPolicy::from_strategies(dims.horizon, dims.states, rows)?,
        MarkovPolicy::from_strategies(dims.horizon, dims.states, cols)?,
    ))
}

/// One ε coin for both players; on heads both act uniformly at random.
fn explore(eps: f64, rng: &mut Rng) -> bool {
    rng.gen::<f64>() < eps
}

fn uniform_pair(dims: GameDims, rng: &mut Rng) -> (usize, usize) {
    (rng.gen_range(0..dims.actions_max), rng.gen_range(0..dims.actions_min))
}
