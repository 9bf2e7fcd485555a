//! Finite-horizon tabular zero-sum Markov games.
//!
//! Steps are indexed `0..H` in code. The game moves with `P[h][s][a][b]` after
//! every step except the last, and pays the max player `r[h][s][a][b]`.

use std::fs;
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{sample_index, validate_simplex, PayoffMatrix};
use crate::policy::MarkovPolicy;
use crate::rng::{stream_rng, Rng, Stream};

/// Row-sum tolerance accepted when reading environment files.
pub const FILE_ROW_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameDims {
    pub horizon: usize,
    pub states: usize,
    pub actions_max: usize,
    pub actions_min: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularMG {
    dims: GameDims,
    initial_state: usize,
    gamma: f64,
    /// `[(H-1) × S × A × B × S]`, row-major.
    transition: Vec<f64>,
    /// `[H × S × A × B]`, row-major.
    reward: Vec<f64>,
}

impl TabularMG {
    /// Builds a game from flat row-major tensors and checks every invariant
    /// with row-sum tolerance `row_tol`.
    pub fn from_parts(
        dims: GameDims,
        initial_state: usize,
        transition: Vec<f64>,
        reward: Vec<f64>,
        row_tol: f64,
    ) -> Result<Self> {
        let GameDims {
            horizon: h,
            states: s,
            actions_max: a,
            actions_min: b,
        } = dims;
        if h == 0 || s == 0 || a == 0 || b == 0 {
            return Err(Error::InvalidArgument(format!(
                "game sizes must be positive, got S={s} A={a} B={b} H={h}"
            )));
        }
        if transition.len() != (h - 1) * s * a * b * s {
            return Err(Error::mismatch("transition tensor", (h - 1) * s * a * b * s, transition.len()));
        }
        if reward.len() != h * s * a * b {
            return Err(Error::mismatch("reward tensor", h * s * a * b, reward.len()));
        }
        if initial_state >= s {
            return Err(Error::InvariantViolation(format!(
                "initial state {initial_state} out of range for {s} states"
            )));
        }
        if reward.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(r) = reward.iter().find(|r| r.abs() > 1.0) {
            return Err(Error::InvariantViolation(format!("reward {r} outside [-1, 1]")));
        }
        for row in transition.chunks(s) {
            validate_simplex(row, row_tol)?;
        }
        Ok(TabularMG {
            dims,
            initial_state,
            gamma: 1.0,
            transition,
            reward,
        })
    }

    /// A one-step, one-state game whose only stage is `matrix`.
    pub fn single_stage(matrix: &PayoffMatrix) -> Result<Self> {
        let dims = GameDims {
            horizon: 1,
            states: 1,
            actions_max: matrix.rows(),
            actions_min: matrix.cols(),
        };
        Self::from_parts(dims, 0, Vec::new(), matrix.entries().to_vec(), 0.0)
    }

    pub fn with_initial_state(mut self, state: usize) -> Result<Self> {
        if state >= self.dims.states {
            return Err(Error::InvariantViolation(format!("initial state {state} out of range")));
        }
        self.initial_state = state;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// Applies `f(h, s, a, b, r)` to every reward; the result must stay in `[-1, 1]`.
    pub fn map_rewards(&self, f: impl Fn(usize, usize, usize, usize, f64) -> f64) -> Result<Self> {
        let GameDims {
            horizon,
            states,
            actions_max,
            actions_min,
        } = self.dims;
        let mut reward = Vec::with_capacity(self.reward.len());
        for h in 0..horizon {
            for s in 0..states {
                for a in 0..actions_max {
                    for b in 0..actions_min {
                        reward.push(f(h, s, a, b, self.reward(h, s, a, b)));
                    }
                }
            }
        }
        let game = Self::from_parts(self.dims, self.initial_state, self.transition.clone(), reward, crate::matrix::SIMPLEX_TOL)?;
        game.with_gamma(self.gamma)
    }

    pub fn dims(&self) -> GameDims {
        self.dims
    }

    pub fn horizon(&self) -> usize {
        self.dims.horizon
    }

    pub fn num_states(&self) -> usize {
        self.dims.states
    }

    pub fn num_actions_max(&self) -> usize {
        self.dims.actions_max
    }

    pub fn num_actions_min(&self) -> usize {
        self.dims.actions_min
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    fn stage_offset(&self, h: usize, s: usize) -> usize {
        (h * self.dims.states + s) * self.dims.actions_max * self.dims.actions_min
    }

    #[inline]
    pub fn reward(&self, h: usize, s: usize, a: usize, b: usize) -> f64 {
        self.reward[self.stage_offset(h, s) + a * self.dims.actions_min + b]
    }

    /// The `A × B` reward block of stage `(h, s)`, row-major.
    pub fn reward_block(&self, h: usize, s: usize) -> &[f64] {
        let start = self.stage_offset(h, s);
        &self.reward[start..start + self.dims.actions_max * self.dims.actions_min]
    }

    /// Next-state distribution after step `h < H-1`.
    #[inline]
    pub fn transition_row(&self, h: usize, s: usize, a: usize, b: usize) -> &[f64] {
        debug_assert!(h + 1 < self.dims.horizon, "no transition out of the last step");
        let n = self.dims.states;
        let start = (self.stage_offset(h, s) + a * self.dims.actions_min + b) * n;
        &self.transition[start..start + n]
    }

    pub fn is_last_step(&self, h: usize) -> bool {
        h + 1 == self.dims.horizon
    }

    /// `Σ_{t=h}^{H-1} γ^{t-h}`, the largest possible |value| from step `h`.
    pub fn value_bound(&self, h: usize) -> f64 {
        (h..self.dims.horizon).map(|t| self.gamma.powi((t - h) as i32)).sum()
    }

    pub fn simulator(&self) -> Simulator<'_> {
        Simulator { game: self }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&EnvFile::from(self)).expect("environment serializes");
        out.push(b'\n');
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Err(Error::MalformedInput("empty environment file".into()));
        }
        let file: EnvFile =
            serde_json::from_slice(bytes).map_err(|e| Error::MalformedInput(e.to_string()))?;
        file.into_game()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

/// Random game with every transition row a normalized vector of `S` uniform
/// draws and every reward uniform in `[-1, 1]`, all from the environment
/// stream of `seed`. Transitions are drawn first, step by step, then rewards.
pub fn generate_random_mg(
    states: usize,
    actions_max: usize,
    actions_min: usize,
    horizon: usize,
    seed: u64,
) -> Result<TabularMG> {
    let dims = GameDims {
        horizon,
        states,
        actions_max,
        actions_min,
    };
    if horizon == 0 || states == 0 || actions_max == 0 || actions_min == 0 {
        return Err(Error::InvalidArgument(format!(
            "game sizes must be positive, got S={states} A={actions_max} B={actions_min} H={horizon}"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Environment);
    let rows = (horizon - 1) * states * actions_max * actions_min;
    let mut transition = Vec::with_capacity(rows * states);
    for _ in 0..rows {
        let draws: Vec<f64> = (0..states).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            transition.extend(draws.iter().map(|d| d / total));
        } else {
            transition.extend(std::iter::repeat_n(1.0 / states as f64, states));
        }
    }
    let reward = (0..horizon * states * actions_max * actions_min)
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    TabularMG::from_parts(dims, 0, transition, reward, crate::matrix::SIMPLEX_TOL)
}

/// What an agent observes when it acts: the game is touched only by sampling.
#[derive(Debug, Clone, Copy)]
pub struct Simulator<'a> {
    game: &'a TabularMG,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub next_state: usize,
    pub done: bool,
}

impl Simulator<'_> {
    pub fn dims(&self) -> GameDims {
        self.game.dims
    }

    pub fn reset(&self) -> usize {
        self.game.initial_state
    }

    pub fn step(&self, h: usize, s: usize, a: usize, b: usize, rng: &mut Rng) -> StepOutcome {
        let reward = self.game.reward(h, s, a, b);
        if self.game.is_last_step(h) {
            return StepOutcome {
                reward,
                next_state: s,
                done: true,
            };
        }
        let next_state = sample_index(self.game.transition_row(h, s, a, b), rng);
        StepOutcome {
            reward,
            next_state,
            done: false,
        }
    }
}

/// One step of experience. At the last step `done` is set and `s_next`
/// repeats `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSample {
    pub h: usize,
    pub s: usize,
    pub a: usize,
    pub b: usize,
    pub r: f64,
    pub done: bool,
    pub s_next: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub trajectory: Vec<TransitionSample>,
    /// `Σ_h γ^h r_h`.
    pub ret: f64,
}

pub fn rollout(game: &TabularMG, mu: &MarkovPolicy, nu: &MarkovPolicy, rng: &mut Rng) -> Result<Rollout> {
    mu.check_against(game, crate::policy::Player::Max)?;
    nu.check_against(game, crate::policy::Player::Min)?;
    let sim = game.simulator();
    let mut s = sim.reset();
    let mut trajectory = Vec::with_capacity(game.horizon());
    let mut ret = 0.0;
    let mut discount = 1.0;
    for h in 0..game.horizon() {
        let a = mu.sample(h, s, rng);
        let b = nu.sample(h, s, rng);
        let out = sim.step(h, s, a, b, rng);
        ret += discount * out.reward;
        discount *= game.gamma;
        trajectory.push(TransitionSample {
            h,
            s,
            a,
            b,
            r: out.reward,
            done: out.done,
            s_next: out.next_state,
        });
        s = out.next_state;
    }
    Ok(Rollout { trajectory, ret })
}

type Nested4 = Vec<Vec<Vec<Vec<f64>>>>;

/// On-disk layout of an environment.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvFile {
    #[serde(rename = "S")]
    states: usize,
    #[serde(rename = "A")]
    actions_max: usize,
    #[serde(rename = "B")]
    actions_min: usize,
    #[serde(rename = "H")]
    horizon: usize,
    initial_state: usize,
    #[serde(default = "unit_gamma", skip_serializing_if = "is_unit")]
    gamma: f64,
    transition: Vec<Nested4>,
    reward: Nested4,
}

fn unit_gamma() -> f64 {
    1.0
}

fn is_unit(g: &f64) -> bool {
    *g == 1.0
}

impl From<&TabularMG> for EnvFile {
    fn from(game: &TabularMG) -> Self {
        let GameDims {
            horizon,
            states,
            actions_max,
            actions_min,
        } = game.dims;
        let transition = (0..horizon.saturating_sub(1))
            .map(|h| {
                (0..states)
                    .map(|s| {
                        (0..actions_max)
                            .map(|a| (0..actions_min).map(|b| game.transition_row(h, s, a, b).to_vec()).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let reward = (0..horizon)
            .map(|h| {
                (0..states)
                    .map(|s| {
                        game.reward_block(h, s).chunks(actions_min).map(<[f64]>::to_vec).collect()
                    })
                    .collect()
            })
            .collect();
        EnvFile {
            states,
            actions_max,
            actions_min,
            horizon,
            initial_state: game.initial_state,
            gamma: game.gamma,
            transition,
            reward,
        }
    }
}

impl EnvFile {
    fn into_game(self) -> Result<TabularMG> {
        let dims = GameDims {
            horizon: self.horizon,
            states: self.states,
            actions_max: self.actions_max,
            actions_min: self.actions_min,
        };
        let shape_err = |what: &str| Error::MalformedInput(format!("{what} has the wrong shape"));
        let mut transition = Vec::new();
        if self.transition.len() != self.horizon.saturating_sub(1) {
            return Err(shape_err("transition"));
        }
        for step in self.transition {
            if step.len() != self.states {
                return Err(shape_err("transition"));
            }
            for per_state in step {
                if per_state.len() != self.actions_max {
                    return Err(shape_err("transition"));
                }
                for per_a in per_state {
                    if per_a.len() != self.actions_min {
                        return Err(shape_err("transition"));
                    }
                    for row in per_a {
                        if row.len() != self.states {
                            return Err(shape_err("transition"));
                        }
                        transition.extend(row);
                    }
                }
            }
        }
        let mut reward = Vec::new();
        if self.reward.len() != self.horizon {
            return Err(shape_err("reward"));
        }
        for step in self.reward {
            if step.len() != self.states {
                return Err(shape_err("reward"));
            }
            for per_state in step {
                if per_state.len() != self.actions_max {
                    return Err(shape_err("reward"));
                }
                for row in per_state {
                    if row.len() != self.actions_min {
                        return Err(shape_err("reward"));
                    }
                    reward.extend(row);
                }
            }
        }
        let game = TabularMG::from_parts(dims, self.initial_state, transition, reward, FILE_ROW_TOL)
            .map_err(|e| match e {
                Error::InvalidArgument(m) => Error::MalformedInput(m),
                other => other,
            })?;
        game.with_gamma(self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::MarkovPolicy;

    #[test]
    fn generation_is_deterministic_and_normalized() {
        let g1 = generate_random_mg(3, 3, 3, 3, 5).unwrap();
        let g2 = generate_random_mg(3, 3, 3, 3, 5).unwrap();
        assert_eq!(g1, g2);
        assert_ne!(g1, generate_random_mg(3, 3, 3, 3, 6).unwrap());
        for row in g1.transition.chunks(3) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        assert!(g1.reward.iter().all(|r| (-1.0..=1.0).contains(r)));
    }

    #[test]
    fn env_two_shape() {
        let g = generate_random_mg(6, 6, 6, 6, 0).unwrap();
        assert_eq!(
            g.dims(),
            GameDims {
                horizon: 6,
                states: 6,
                actions_max: 6,
                actions_min: 6
            }
        );
        assert_eq!(g.transition.len(), 5 * 6 * 36 * 6);
    }

    #[test]
    fn rejects_zero_sizes() {
        assert!(generate_random_mg(0, 1, 1, 1, 0).is_err());
        assert!(generate_random_mg(1, 1, 1, 0, 0).is_err());
    }

    #[test]
    fn round_trip_and_rejections() {
        let g = generate_random_mg(2, 3, 2, 3, 9).unwrap();
        let bytes = g.to_bytes();
        assert_eq!(TabularMG::from_bytes(&bytes).unwrap(), g);
        assert!(matches!(TabularMG::from_bytes(b""), Err(Error::MalformedInput(_))));
        assert!(matches!(TabularMG::from_bytes(b"{\"S\": 1}"), Err(Error::MalformedInput(_))));

        let mut file = EnvFile::from(&g);
        file.transition[0][0][0][0] = vec![0.25, 0.25];
        let bad = serde_json::to_vec(&file).unwrap();
        assert!(matches!(TabularMG::from_bytes(&bad), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn file_uses_fixed_field_names() {
        let g = TabularMG::single_stage(&PayoffMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap())
            .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&g.to_bytes()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["S", "A", "B", "H", "initial_state", "transition", "reward"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["transition"], serde_json::json!([]));
        assert_eq!(v["reward"], serde_json::json!([[[[1.0, -1.0], [-1.0, 1.0]]]]));
    }

    #[test]
    fn deterministic_rollout_follows_unique_path() {
        // Two states, two steps; action pairs steer deterministically.
        let dims = GameDims {
            horizon: 2,
            states: 2,
            actions_max: 2,
            actions_min: 2,
        };
        let mut transition = Vec::new();
        for _s in 0..2 {
            for a in 0..2 {
                for _b in 0..2 {
                    transition.extend(if a == 0 { [1.0, 0.0] } else { [0.0, 1.0] });
                }
            }
        }
        let reward = vec![0.1, 0.2, 0.3, 0.4, 0.0, 0.0, 0.0, 0.0, -0.5, -0.6, -0.7, -0.8, 0.9, 1.0, -1.0, 0.5];
        let g = TabularMG::from_parts(dims, 0, transition, reward, 1e-12).unwrap();
        let mu = MarkovPolicy::deterministic(2, 2, 2, &[1, 1, 0, 0]).unwrap();
        let nu = MarkovPolicy::deterministic(2, 2, 2, &[0, 0, 1, 1]).unwrap();
        let mut rng = stream_rng(0, Stream::Rollout);
        let out = rollout(&g, &mu, &nu, &mut rng).unwrap();
        assert_eq!(out.trajectory.len(), 2);
        // step 0: s=0, a=1, b=0 → r=0.3, next state 1; step 1: s=1, a=0, b=1 → r=1.0
        assert_eq!(out.trajectory[0].s_next, 1);
        assert_eq!(out.trajectory[1].r, 1.0);
        assert!(out.trajectory[1].done && !out.trajectory[0].done);
        assert_eq!(out.ret, 0.3 + 1.0);
    }

    #[test]
    fn single_step_return_is_stage_reward() {
        let g = generate_random_mg(3, 2, 2, 1, 4).unwrap();
        let mu = MarkovPolicy::uniform(1, 3, 2);
        let nu = MarkovPolicy::uniform(1, 3, 2);
        let mut rng = stream_rng(2, Stream::Rollout);
        for _ in 0..20 {
            let out = rollout(&g, &mu, &nu, &mut rng).unwrap();
            let t = out.trajectory[0];
            assert_eq!(out.ret, g.reward(0, 0, t.a, t.b));
            assert!(t.done);
        }
    }

    #[test]
    fn rollout_checks_dimensions() {
        let g = generate_random_mg(3, 2, 2, 2, 4).unwrap();
        let mu = MarkovPolicy::uniform(2, 3, 3);
        let nu = MarkovPolicy::uniform(2, 3, 2);
        let mut rng = stream_rng(2, Stream::Rollout);
        assert!(matches!(rollout(&g, &mu, &nu, &mut rng), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn value_bound_with_discount() {
        let g = generate_random_mg(1, 1, 1, 3, 0).unwrap().with_gamma(0.5).unwrap();
        assert_eq!(g.value_bound(0), 1.75);
        assert_eq!(g.value_bound(2), 1.0);
    }
}
