//! Ground truth on a known game: Nash solutions by backward induction, exact
//! best responses and the duality gap.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{GameDims, TabularMG};
use crate::matrix::{solve_lp, MatrixNashSolution, MixedStrategy, PayoffMatrix};
use crate::policy::{MarkovPolicy, MixturePolicy, Player, Strategy};

/// Gap tolerance for every stage game solved by the oracle.
pub const ORACLE_LP_TOL: f64 = 1e-8;

/// Default cap on distinct history nodes in [`best_response_to_mixture`].
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// `V[h][s]` for `h` in `0..=H`, with `V[H] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    horizon: usize,
    states: usize,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn zeros(horizon: usize, states: usize) -> Self {
        ValueTable {
            horizon,
            states,
            values: vec![0.0; (horizon + 1) * states],
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize) -> f64 {
        self.values[h * self.states + s]
    }

    #[inline]
    pub fn set(&mut self, h: usize, s: usize, v: f64) {
        self.values[h * self.states + s] = v;
    }

    pub fn step(&self, h: usize) -> &[f64] {
        &self.values[h * self.states..(h + 1) * self.states]
    }
}

/// `Q[h][s][a][b]` stored as one row-major `A × B` block per `(h, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    dims: GameDims,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(dims: GameDims) -> Self {
        QTable {
            dims,
            values: vec![0.0; dims.horizon * dims.states * dims.actions_max * dims.actions_min],
        }
    }

    pub fn dims(&self) -> GameDims {
        self.dims
    }

    #[inline]
    fn offset(&self, h: usize, s: usize) -> usize {
        (h * self.dims.states + s) * self.dims.actions_max * self.dims.actions_min
    }

    pub fn block(&self, h: usize, s: usize) -> &[f64] {
        let o = self.offset(h, s);
        &self.values[o..o + self.dims.actions_max * self.dims.actions_min]
    }

    pub fn block_mut(&mut self, h: usize, s: usize) -> &mut [f64] {
        let o = self.offset(h, s);
        let n = self.dims.actions_max * self.dims.actions_min;
        &mut self.values[o..o + n]
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize, b: usize) -> f64 {
        self.values[self.offset(h, s) + a * self.dims.actions_min + b]
    }

    #[inline]
    pub fn set(&mut self, h: usize, s: usize, a: usize, b: usize, v: f64) {
        let o = self.offset(h, s) + a * self.dims.actions_min + b;
        self.values[o] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stage_matrix(&self, h: usize, s: usize) -> Result<PayoffMatrix> {
        PayoffMatrix::new(self.dims.actions_max, self.dims.actions_min, self.block(h, s).to_vec())
    }

    /// Equilibrium of the stage game `Q[h][s]`.
    pub fn stage_nash(&self, h: usize, s: usize) -> Result<MatrixNashSolution> {
        solve_lp(&self.stage_matrix(h, s)?, ORACLE_LP_TOL)
    }

    /// Per-stage equilibria assembled into a policy pair.
    pub fn nash_policies(&self) -> Result<(MarkovPolicy, MarkovPolicy)> {
        let GameDims { horizon, states, .. } = self.dims;
        let mut rows = Vec::with_capacity(horizon * states);
        let mut cols = Vec::with_capacity(horizon * states);
        for h in 0..horizon {
            for s in 0..states {
                let sol = self.stage_nash(h, s)?;
                rows.push(sol.row_strategy);
                cols.push(sol.col_strategy);
            }
        }
        Ok((
            MarkovPolicy::from_strategies(horizon, states, rows)?,
            MarkovPolicy::from_strategies(horizon, states, cols)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashSolutionMG {
    pub q_star: QTable,
    pub v_star: ValueTable,
    pub mu_star: MarkovPolicy,
    pub nu_star: MarkovPolicy,
}

impl NashSolutionMG {
    /// `V⋆` at the game's initial state.
    pub fn value(&self, game: &TabularMG) -> f64 {
        self.v_star.get(0, game.initial_state())
    }
}

/// Fills the `A × B` block `r[h][s] + γ P[h][s] V[h+1]` into `out`.
fn backup_into(game: &TabularMG, next: &ValueTable, h: usize, s: usize, out: &mut [f64]) {
    let nb = game.num_actions_min();
    out.copy_from_slice(game.reward_block(h, s));
    if game.is_last_step(h) {
        return;
    }
    let v = next.step(h + 1);
    for a in 0..game.num_actions_max() {
        for b in 0..nb {
            let ev: f64 = game.transition_row(h, s, a, b).iter().zip(v).map(|(p, x)| p * x).sum();
            out[a * nb + b] += game.gamma() * ev;
        }
    }
}

/// Backward induction with an LP equilibrium at every stage.
pub fn exact_nash_solve(game: &TabularMG) -> Result<NashSolutionMG> {
    let dims = game.dims();
    let mut q = QTable::zeros(dims);
    let mut v = ValueTable::zeros(dims.horizon, dims.states);
    let mut rows = vec![None; dims.horizon * dims.states];
    let mut cols = vec![None; dims.horizon * dims.states];
    for h in (0..dims.horizon).rev() {
        for s in 0..dims.states {
            let mut block = vec![0.0; dims.actions_max * dims.actions_min];
            backup_into(game, &v, h, s, &mut block);
            q.block_mut(h, s).copy_from_slice(&block);
            let sol = q.stage_nash(h, s)?;
            v.set(h, s, sol.value);
            rows[h * dims.states + s] = Some(sol.row_strategy);
            cols[h * dims.states + s] = Some(sol.col_strategy);
        }
    }
    let unwrap = |v: Vec<Option<MixedStrategy>>| v.into_iter().map(|x| x.expect("every stage solved")).collect();
    Ok(NashSolutionMG {
        mu_star: MarkovPolicy::from_strategies(dims.horizon, dims.states, unwrap(rows))?,
        nu_star: MarkovPolicy::from_strategies(dims.horizon, dims.states, unwrap(cols))?,
        q_star: q,
        v_star: v,
    })
}

/// Exact value of `(mu, nu)` at every `(h, s)`.
pub fn policy_value(game: &TabularMG, mu: &MarkovPolicy, nu: &MarkovPolicy) -> Result<ValueTable> {
    mu.check_against(game, Player::Max)?;
    nu.check_against(game, Player::Min)?;
    let dims = game.dims();
    let mut v = ValueTable::zeros(dims.horizon, dims.states);
    let mut block = vec![0.0; dims.actions_max * dims.actions_min];
    for h in (0..dims.horizon).rev() {
        for s in 0..dims.states {
            backup_into(game, &v, h, s, &mut block);
            let (x, y) = (mu.dist(h, s), nu.dist(h, s));
            let mut total = 0.0;
            for (a, &pa) in x.iter().enumerate() {
                if pa == 0.0 {
                    continue;
                }
                let row = &block[a * dims.actions_min..(a + 1) * dims.actions_min];
                total += pa * row.iter().zip(y).map(|(q, pb)| q * pb).sum::<f64>();
            }
            v.set(h, s, total);
        }
    }
    Ok(v)
}

/// Exact best response to a Markov policy owned by `owner`.
///
/// Returns the responder's pure policy (lowest-index ties) and the value table
/// of the pair: `V^{μ,†}` when `owner` is the max player, `V^{†,ν}` otherwise.
pub fn best_response_to_markov(
    game: &TabularMG,
    policy: &MarkovPolicy,
    owner: Player,
) -> Result<(MarkovPolicy, ValueTable)> {
    policy.check_against(game, owner)?;
    let dims = game.dims();
    let (na, nb) = (dims.actions_max, dims.actions_min);
    let mut v = ValueTable::zeros(dims.horizon, dims.states);
    let mut choices = vec![0usize; dims.horizon * dims.states];
    let mut block = vec![0.0; na * nb];
    for h in (0..dims.horizon).rev() {
        for s in 0..dims.states {
            backup_into(game, &v, h, s, &mut block);
            let p = policy.dist(h, s);
            let (choice, value) = match owner {
                Player::Max => {
                    let payoffs: Vec<f64> = (0..nb).map(|b| (0..na).map(|a| p[a] * block[a * nb + b]).sum()).collect();
                    let b = crate::matrix::argmin(&payoffs);
                    (b, payoffs[b])
                }
                Player::Min => {
                    let payoffs: Vec<f64> =
                        (0..na).map(|a| (0..nb).map(|b| p[b] * block[a * nb + b]).sum()).collect();
                    let a = crate::matrix::argmax(&payoffs);
                    (a, payoffs[a])
                }
            };
            choices[h * dims.states + s] = choice;
            v.set(h, s, value);
        }
    }
    let responder = MarkovPolicy::deterministic(dims.horizon, dims.states, owner.opponent().num_actions(game), &choices)?;
    Ok((responder, v))
}

impl MixturePolicy {
    /// Posterior over components after the owner was seen playing
    /// `history = [(s_1, x_1), …]` at steps `0, 1, …`. `None` when no
    /// supported component could have produced the history.
    pub fn posterior_after(&self, history: &[(usize, usize)]) -> Option<Vec<f64>> {
        let mut weights: Vec<f64> = self.meta().probs().to_vec();
        for (h, &(s, x)) in history.iter().enumerate() {
            for (w, c) in weights.iter_mut().zip(self.components()) {
                *w *= c.dist(h, s)[x];
            }
        }
        let total: f64 = weights.iter().sum();
        (total > 0.0).then(|| weights.into_iter().map(|w| w / total).collect())
    }
}

/// Value of the best response to the behavior induced by a mixture owned by
/// `owner`, at the initial state.
///
/// The responder may condition on the whole history. Because transitions do
/// not depend on which component is active, the posterior over components
/// after a history depends only on the owner's visited states and actions,
/// and the continuation value at a node depends only on `(h, s, posterior)`.
/// Nodes are memoized on that key; `node_budget` caps the number of distinct
/// nodes evaluated.
pub fn best_response_to_mixture(
    game: &TabularMG,
    mixture: &MixturePolicy,
    owner: Player,
    node_budget: usize,
) -> Result<f64> {
    mixture.components()[0].check_against(game, owner)?;
    let (components, prior): (Vec<&MarkovPolicy>, Vec<f64>) = mixture.support().unzip();
    let mut search = HistorySearch {
        game,
        components,
        owner,
        budget: node_budget,
        memo: HashMap::new(),
    };
    search.value(0, game.initial_state(), &prior)
}

struct HistorySearch<'a> {
    game: &'a TabularMG,
    components: Vec<&'a MarkovPolicy>,
    owner: Player,
    budget: usize,
    memo: HashMap<(usize, usize, Vec<u64>), f64>,
}

impl HistorySearch<'_> {
    fn value(&mut self, h: usize, s: usize, posterior: &[f64]) -> Result<f64> {
        let key = (h, s, posterior.iter().map(|p| p.to_bits()).collect::<Vec<_>>());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if self.memo.len() >= self.budget {
            return Err(Error::HistoryBudgetExceeded { budget: self.budget });
        }
        let game = self.game;
        let (na, nb) = (game.num_actions_max(), game.num_actions_min());
        let (n_own, n_resp) = match self.owner {
            Player::Max => (na, nb),
            Player::Min => (nb, na),
        };
        // Behavior of the mixture at this node.
        let mut own = vec![0.0; n_own];
        for (w, c) in posterior.iter().zip(&self.components) {
            for (o, p) in own.iter_mut().zip(c.dist(h, s)) {
                *o += w * p;
            }
        }
        // payoff[x][y]: owner plays x, responder plays y.
        let mut payoff = vec![0.0; n_own * n_resp];
        for x in 0..n_own {
            if own[x] == 0.0 {
                continue;
            }
            let children = if game.is_last_step(h) {
                None
            } else {
                let next: Vec<f64> = posterior
                    .iter()
                    .zip(&self.components)
                    .map(|(w, c)| w * c.dist(h, s)[x] / own[x])
                    .collect();
                let mut values = Vec::with_capacity(game.num_states());
                for s_next in 0..game.num_states() {
                    values.push(self.value(h + 1, s_next, &next)?);
                }
                Some(values)
            };
            for y in 0..n_resp {
                let (a, b) = match self.owner {
                    Player::Max => (x, y),
                    Player::Min => (y, x),
                };
                let mut q = game.reward(h, s, a, b);
                if let Some(values) = &children {
                    let ev: f64 = game.transition_row(h, s, a, b).iter().zip(values).map(|(p, v)| p * v).sum();
                    q += game.gamma() * ev;
                }
                payoff[x * n_resp + y] = q;
            }
        }
        let responses = (0..n_resp).map(|y| (0..n_own).map(|x| own[x] * payoff[x * n_resp + y]).sum::<f64>());
        let value = match self.owner {
            Player::Max => responses.fold(f64::INFINITY, f64::min),
            Player::Min => responses.fold(f64::NEG_INFINITY, f64::max),
        };
        self.memo.insert(key, value);
        Ok(value)
    }
}

/// Best-response value against `strategy` owned by `owner`, at the initial
/// state. Markov strategies (and one-hot mixtures) use the Markov dynamic
/// program; genuine mixtures use the history recursion.
pub fn best_response_value(game: &TabularMG, strategy: &Strategy, owner: Player, node_budget: usize) -> Result<f64> {
    match (strategy.as_markov(), strategy) {
        (Some(p), _) => Ok(best_response_to_markov(game, p, owner)?.1.get(0, game.initial_state())),
        (None, Strategy::Mixture(m)) => best_response_to_mixture(game, m, owner, node_budget),
        (None, Strategy::Markov(_)) => unreachable!("Markov strategies are always Markov"),
    }
}

/// Duality gap `V^{†,ν̂}(s₁) − V^{μ̂,†}(s₁)`.
pub fn exploitability(game: &TabularMG, mu_hat: &Strategy, nu_hat: &Strategy) -> Result<f64> {
    exploitability_with_budget(game, mu_hat, nu_hat, DEFAULT_NODE_BUDGET)
}

pub fn exploitability_with_budget(game: &TabularMG, mu_hat: &Strategy, nu_hat: &Strategy, node_budget: usize) -> Result<f64> {
    let against_nu = best_response_value(game, nu_hat, Player::Min, node_budget)?;
    let against_mu = best_response_value(game, mu_hat, Player::Max, node_budget)?;
    Ok(against_nu - against_mu)
}
