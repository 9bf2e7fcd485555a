//! Tabular two-player zero-sum Markov games.
//!
//! * [`matrix`]: normal-form equilibria by linear programming and by
//!   multiplicative weights.
//! * [`game`]: finite-horizon tabular games, random generation, rollouts and
//!   the environment file format.
//! * [`policy`]: Markov policies, mixtures over them and the policy file format.
//! * [`oracle`]: backward-induction Nash solutions, exact best responses and
//!   exploitability.
//! * [`learners`]: Nash value iteration (with and without an exploiter) and
//!   Nash Q-learning.
//! * [`baselines`]: self-play, fictitious self-play and double oracle on top of
//!   a Q-learning best response.
//! * [`harness`]: configuration, experiment runner, CSV logs, SVG plots and the
//!   solver benchmark behind the `nashmg` binary.

pub mod baselines;
pub mod error;
pub mod game;
pub mod harness;
pub mod learners;
pub mod matrix;
pub mod oracle;
pub mod policy;
pub mod rng;

pub use error::{Error, Result};
pub use game::{generate_random_mg, rollout, GameDims, Simulator, TabularMG, TransitionSample};
pub use matrix::{matrix_exploitability, solve_lp, solve_mwu, MatrixNashSolution, MixedStrategy, PayoffMatrix};
pub use policy::{MarkovPolicy, MixturePolicy, Player, PolicyPair, Strategy};
