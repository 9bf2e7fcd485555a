//! Meta-game construction: payoffs of every pairing of two policy sets and
//! the equilibrium of the resulting matrix game.

use rand::Rng as _;
use rayon::prelude::*;

use super::{MetaStrategy, PolicySet};
use crate::error::{Error, Result};
use crate::game::{rollout, TabularMG};
use crate::matrix::{solve_lp, PayoffMatrix, DEFAULT_LP_TOL};
use crate::oracle::policy_value;
use crate::policy::{MarkovPolicy, Player};
use crate::rng::{substream, Rng, Stream};

/// How each meta-game entry is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaEval {
    /// Mean return of this many fresh rollouts per pairing.
    MonteCarlo(u64),
    /// Exact value from the known model.
    Exact,
}

impl MetaEval {
    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            MetaEval::MonteCarlo(0) => Err(Error::InvalidArgument("meta evaluation needs at least one episode".into())),
            _ => Ok(()),
        }
    }
}

/// Empirical payoff matrix, rows indexed by `set_mu`, columns by `set_nu`.
pub fn meta_payoffs(
    game: &TabularMG,
    set_mu: &PolicySet,
    set_nu: &PolicySet,
    eval: MetaEval,
    rng: &mut Rng,
) -> Result<PayoffMatrix> {
    eval.validate()?;
    check_owner(set_mu, Player::Max)?;
    check_owner(set_nu, Player::Min)?;
    let (m, n) = (set_mu.len(), set_nu.len());
    let base: u64 = rng.gen();
    let entry = |idx: usize| -> Result<f64> {
        let (mu, nu) = (&set_mu.policies()[idx / n], &set_nu.policies()[idx % n]);
        match eval {
            MetaEval::Exact => Ok(policy_value(game, mu, nu)?.get(0, game.initial_state())),
            MetaEval::MonteCarlo(episodes) => mean_return(game, mu, nu, episodes, &mut substream(base, Stream::Evaluation, idx as u64)),
        }
    };
    let entries = (0..m * n).into_par_iter().map(entry).collect::<Result<Vec<f64>>>()?;
    PayoffMatrix::new(m, n, entries)
}

/// Equilibrium meta-strategies of the empirical game between two sets.
pub fn meta_nash(
    game: &TabularMG,
    set_mu: &PolicySet,
    set_nu: &PolicySet,
    eval: MetaEval,
    rng: &mut Rng,
) -> Result<(MetaStrategy, MetaStrategy)> {
    let payoffs = meta_payoffs(game, set_mu, set_nu, eval, rng)?;
    let sol = solve_lp(&payoffs, DEFAULT_LP_TOL)?;
    Ok((sol.row_strategy, sol.col_strategy))
}

fn mean_return(game: &TabularMG, mu: &MarkovPolicy, nu: &MarkovPolicy, episodes: u64, rng: &mut Rng) -> Result<f64> {
    let mut total = 0.0;
    for _ in 0..episodes {
        total += rollout(game, mu, nu, rng)?.ret;
    }
    Ok(total / episodes as f64)
}

fn check_owner(set: &PolicySet, owner: Player) -> Result<()> {
    if set.owner() != owner {
        return Err(Error::InvalidArgument(format!("expected a {owner:?} policy set")));
    }
    Ok(())
}
