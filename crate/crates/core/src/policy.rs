//! Policies over a [`TabularMG`] and the policy file format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::TabularMG;
use crate::matrix::{sample_index, validate_simplex, MixedStrategy, SIMPLEX_TOL};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }

    pub fn num_actions(self, game: &TabularMG) -> usize {
        match self {
            Player::Max => game.num_actions_max(),
            Player::Min => game.num_actions_min(),
        }
    }
}

type Nested3 = Vec<Vec<Vec<f64>>>;

/// Per-step, per-state action distributions `π[h][s]` for one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Nested3", into = "Nested3")]
pub struct MarkovPolicy {
    horizon: usize,
    states: usize,
    actions: usize,
    probs: Vec<f64>,
}

impl MarkovPolicy {
    /// `probs` is row-major `[horizon × states × actions]`.
    pub fn new(horizon: usize, states: usize, actions: usize, probs: Vec<f64>) -> Result<Self> {
        if horizon == 0 || states == 0 || actions == 0 {
            return Err(Error::InvalidArgument("policy sizes must be positive".into()));
        }
        if probs.len() != horizon * states * actions {
            return Err(Error::mismatch("policy table", horizon * states * actions, probs.len()));
        }
        for row in probs.chunks(actions) {
            validate_simplex(row, SIMPLEX_TOL)?;
        }
        Ok(MarkovPolicy {
            horizon,
            states,
            actions,
            probs,
        })
    }

    pub fn uniform(horizon: usize, states: usize, actions: usize) -> Self {
        Self::new(horizon, states, actions, vec![1.0 / actions as f64; horizon * states * actions])
            .expect("uniform policy is valid")
    }

    /// Pure policy playing `choices[h * states + s]`.
    pub fn deterministic(horizon: usize, states: usize, actions: usize, choices: &[usize]) -> Result<Self> {
        if choices.len() != horizon * states {
            return Err(Error::mismatch("deterministic choices", horizon * states, choices.len()));
        }
        let mut probs = vec![0.0; horizon * states * actions];
        for (i, &c) in choices.iter().enumerate() {
            if c >= actions {
                return Err(Error::InvalidArgument(format!("action {c} out of range {actions}")));
            }
            probs[i * actions + c] = 1.0;
        }
        Self::new(horizon, states, actions, probs)
    }

    /// Assembles a policy from one distribution per `(h, s)`, in `h`-major order.
    pub fn from_strategies(horizon: usize, states: usize, rows: Vec<MixedStrategy>) -> Result<Self> {
        let actions = rows.first().map_or(0, MixedStrategy::len);
        if rows.len() != horizon * states {
            return Err(Error::mismatch("policy rows", horizon * states, rows.len()));
        }
        let probs = rows
            .into_iter()
            .map(|r| {
                if r.len() == actions {
                    Ok(r.into_inner())
                } else {
                    Err(Error::mismatch("policy row", actions, r.len()))
                }
            })
            .collect::<Result<Vec<_>>>()?
            .concat();
        Self::new(horizon, states, actions, probs)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    #[inline]
    pub fn dist(&self, h: usize, s: usize) -> &[f64] {
        let start = (h * self.states + s) * self.actions;
        &self.probs[start..start + self.actions]
    }

    pub fn sample(&self, h: usize, s: usize, rng: &mut Rng) -> usize {
        sample_index(self.dist(h, s), rng)
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0 || p == 1.0)
    }

    /// Checks that this policy fits `game` when played by `player`.
    pub fn check_against(&self, game: &TabularMG, player: Player) -> Result<()> {
        if self.horizon != game.horizon() {
            return Err(Error::mismatch("policy horizon", game.horizon(), self.horizon));
        }
        if self.states != game.num_states() {
            return Err(Error::mismatch("policy states", game.num_states(), self.states));
        }
        let actions = player.num_actions(game);
        if self.actions != actions {
            return Err(Error::mismatch("policy actions", actions, self.actions));
        }
        Ok(())
    }

    pub(crate) fn same_shape(&self, other: &MarkovPolicy) -> bool {
        self.horizon == other.horizon && self.states == other.states && self.actions == other.actions
    }
}

impl TryFrom<Nested3> for MarkovPolicy {
    type Error = Error;

    fn try_from(nested: Nested3) -> Result<Self> {
        let horizon = nested.len();
        let states = nested.first().map_or(0, Vec::len);
        let actions = nested.first().and_then(|s| s.first()).map_or(0, Vec::len);
        let mut probs = Vec::with_capacity(horizon * states * actions);
        for step in nested {
            if step.len() != states {
                return Err(Error::MalformedInput("ragged policy table".into()));
            }
            for row in step {
                if row.len() != actions {
                    return Err(Error::MalformedInput("ragged policy table".into()));
                }
                probs.extend(row);
            }
        }
        Self::new(horizon, states, actions, probs)
    }
}

impl From<MarkovPolicy> for Nested3 {
    fn from(p: MarkovPolicy) -> Self {
        p.probs
            .chunks(p.states * p.actions)
            .map(|step| step.chunks(p.actions).map(<[f64]>::to_vec).collect())
            .collect()
    }
}

/// A distribution over Markov policies; one component is drawn per episode.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePolicy {
    components: Vec<MarkovPolicy>,
    meta: MixedStrategy,
}

impl MixturePolicy {
    pub fn new(components: Vec<MarkovPolicy>, meta: MixedStrategy) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("mixture needs at least one component".into()))?;
        if meta.len() != components.len() {
            return Err(Error::mismatch("mixture weights", components.len(), meta.len()));
        }
        if !components.iter().all(|c| c.same_shape(first)) {
            return Err(Error::InvalidArgument("mixture components differ in shape".into()));
        }
        Ok(MixturePolicy { components, meta })
    }

    pub fn singleton(policy: MarkovPolicy) -> Self {
        MixturePolicy {
            components: vec![policy],
            meta: MixedStrategy::pure(1, 0),
        }
    }

    pub fn components(&self) -> &[MarkovPolicy] {
        &self.components
    }

    pub fn meta(&self) -> &MixedStrategy {
        &self.meta
    }

    /// Draws a component by the meta weights. A lone component is returned
    /// without touching `rng`, so it behaves exactly like a Markov policy.
    pub fn sample_component(&self, rng: &mut Rng) -> &MarkovPolicy {
        if self.components.len() == 1 {
            return &self.components[0];
        }
        &self.components[self.meta.sample(rng)]
    }

    /// Components with positive weight, paired with their weights.
    pub fn support(&self) -> impl Iterator<Item = (&MarkovPolicy, f64)> {
        self.components.iter().zip(self.meta.probs()).filter(|(_, &w)| w > 0.0).map(|(c, &w)| (c, w))
    }

    /// The single supported component when the meta strategy is one-hot.
    pub fn as_single(&self) -> Option<&MarkovPolicy> {
        let mut it = self.support();
        match (it.next(), it.next()) {
            (Some((c, _)), None) => Some(c),
            _ => None,
        }
    }

    fn first(&self) -> &MarkovPolicy {
        &self.components[0]
    }
}

/// What a player deploys: a Markov policy or a mixture sampled once per episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "StrategyRepr", into = "StrategyRepr")]
pub enum Strategy {
    Markov(MarkovPolicy),
    Mixture(MixturePolicy),
}

impl Strategy {
    pub fn check_against(&self, game: &TabularMG, player: Player) -> Result<()> {
        match self {
            Strategy::Markov(p) => p.check_against(game, player),
            Strategy::Mixture(m) => m.first().check_against(game, player),
        }
    }

    /// Draws the Markov policy to follow for one episode.
    pub fn episode_policy(&self, rng: &mut Rng) -> &MarkovPolicy {
        match self {
            Strategy::Markov(p) => p,
            Strategy::Mixture(m) => m.sample_component(rng),
        }
    }

    /// The Markov policy this strategy is equivalent to, when there is one.
    pub fn as_markov(&self) -> Option<&MarkovPolicy> {
        match self {
            Strategy::Markov(p) => Some(p),
            Strategy::Mixture(m) => m.as_single(),
        }
    }
}

impl From<MarkovPolicy> for Strategy {
    fn from(p: MarkovPolicy) -> Self {
        Strategy::Markov(p)
    }
}

impl From<MixturePolicy> for Strategy {
    fn from(m: MixturePolicy) -> Self {
        Strategy::Mixture(m)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StrategyRepr {
    Markov {
        probs: MarkovPolicy,
    },
    Mixture {
        components: Vec<MarkovPolicy>,
        meta: MixedStrategy,
    },
}

impl TryFrom<StrategyRepr> for Strategy {
    type Error = Error;

    fn try_from(repr: StrategyRepr) -> Result<Self> {
        Ok(match repr {
            StrategyRepr::Markov { probs } => Strategy::Markov(probs),
            StrategyRepr::Mixture { components, meta } => Strategy::Mixture(MixturePolicy::new(components, meta)?),
        })
    }
}

impl From<Strategy> for StrategyRepr {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Markov(probs) => StrategyRepr::Markov { probs },
            Strategy::Mixture(MixturePolicy { components, meta }) => StrategyRepr::Mixture { components, meta },
        }
    }
}

/// Contents of a policy file: one strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyPair {
    pub max_player: Strategy,
    pub min_player: Strategy,
}

impl PolicyPair {
    pub fn new(max_player: impl Into<Strategy>, min_player: impl Into<Strategy>) -> Self {
        PolicyPair {
            max_player: max_player.into(),
            min_player: min_player.into(),
        }
    }

    pub fn check_against(&self, game: &TabularMG) -> Result<()> {
        self.max_player.check_against(game, Player::Max)?;
        self.min_player.check_against(game, Player::Min)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("policy serializes");
        out.push(b'\n');
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Err(Error::MalformedInput("empty policy file".into()));
        }
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MarkovPolicy::new(1, 1, 2, vec![0.3, 0.3]).is_err());
        assert!(MarkovPolicy::new(1, 2, 2, vec![0.5, 0.5]).is_err());
        assert!(MarkovPolicy::deterministic(1, 1, 2, &[2]).is_err());
        let p = MarkovPolicy::deterministic(2, 1, 3, &[2, 0]).unwrap();
        assert_eq!(p.dist(0, 0), &[0.0, 0.0, 1.0]);
        assert_eq!(p.dist(1, 0), &[1.0, 0.0, 0.0]);
        assert!(p.is_deterministic());
    }

    #[test]
    fn mixture_validation() {
        let a = MarkovPolicy::uniform(2, 2, 2);
        let b = MarkovPolicy::uniform(2, 2, 3);
        assert!(MixturePolicy::new(vec![], MixedStrategy::pure(1, 0)).is_err());
        assert!(MixturePolicy::new(vec![a.clone()], MixedStrategy::uniform(2)).is_err());
        assert!(MixturePolicy::new(vec![a.clone(), b], MixedStrategy::uniform(2)).is_err());
        let m = MixturePolicy::new(vec![a.clone(), a.clone()], MixedStrategy::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(m.as_single(), Some(&a));
        assert_eq!(m.support().count(), 1);
    }

    #[test]
    fn policy_file_round_trip() {
        let mu = MarkovPolicy::deterministic(2, 2, 2, &[0, 1, 1, 0]).unwrap();
        let nu = MixturePolicy::new(
            vec![MarkovPolicy::uniform(2, 2, 3), MarkovPolicy::deterministic(2, 2, 3, &[2, 2, 1, 0]).unwrap()],
            MixedStrategy::new(vec![0.25, 0.75]).unwrap(),
        )
        .unwrap();
        let pair = PolicyPair::new(mu, nu);
        let back = PolicyPair::from_bytes(&pair.to_bytes()).unwrap();
        assert_eq!(back, pair);
        let v: serde_json::Value = serde_json::from_slice(&pair.to_bytes()).unwrap();
        assert_eq!(v["max_player"]["kind"], "markov");
        assert_eq!(v["min_player"]["kind"], "mixture");
        assert_eq!(v["max_player"]["probs"][1][0], serde_json::json!([0.0, 1.0]));
    }

    #[test]
    fn policy_file_rejects_invalid_rows() {
        let text = r#"{"max_player":{"kind":"markov","probs":[[[0.5,0.4]]]},
                       "min_player":{"kind":"markov","probs":[[[1.0]]]}}"#;
        assert!(PolicyPair::from_bytes(text.as_bytes()).is_err());
        assert!(matches!(PolicyPair::from_bytes(b"  "), Err(Error::MalformedInput(_))));
    }
}
