//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use nashmg::matrix::MixedStrategy;
use nashmg::policy::{MarkovPolicy, MixturePolicy, Player};
use nashmg::rng::Rng;
use nashmg::TabularMG;
use rand::Rng as _;

/// Random Markov policy; roughly a third of the entries are zeroed so that
/// observed actions actually discriminate between mixture components.
pub fn random_markov(horizon: usize, states: usize, actions: usize, rng: &mut Rng) -> MarkovPolicy {
    let mut probs = Vec::with_capacity(horizon * states * actions);
    for _ in 0..horizon * states {
        let mut w: Vec<f64> = (0..actions)
            .map(|_| if rng.gen::<f64>() < 0.3 { 0.0 } else { rng.gen::<f64>() })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            w[rng.gen_range(0..actions)] = 1.0;
        }
        let total: f64 = w.iter().sum();
        probs.extend(w.into_iter().map(|x| x / total));
    }
    MarkovPolicy::new(horizon, states, actions, probs).unwrap()
}

pub fn random_mixture(game: &TabularMG, owner: Player, components: usize, rng: &mut Rng) -> MixturePolicy {
    let n = owner.num_actions(game);
    let policies = (0..components)
        .map(|_| random_markov(game.horizon(), game.num_states(), n, rng))
        .collect();
    let weights: Vec<f64> = (0..components).map(|_| 0.1 + rng.gen::<f64>()).collect();
    MixturePolicy::new(policies, MixedStrategy::from_weights(weights).unwrap()).unwrap()
}

/// One observed step: state, responder action, owner action.
type Step = (usize, usize, usize);

/// Every information set of the responder: the full history of states and
/// both players' actions before acting at step `history.len()`.
fn decision_points(game: &TabularMG, owner: Player, history: &mut Vec<Step>, s: usize, out: &mut Vec<(Vec<Step>, usize)>) {
    let h = history.len();
    out.push((history.clone(), s));
    if h + 1 == game.horizon() {
        return;
    }
    let (own_n, other_n) = (owner.opponent().num_actions(game), owner.num_actions(game));
    for x in 0..own_n {
        for y in 0..other_n {
            for s_next in 0..game.num_states() {
                history.push((s, x, y));
                decision_points(game, owner, history, s_next, out);
                history.pop();
            }
        }
    }
}

/// Value of a pure history-dependent responder (`choice` indexed like
/// `points`) against one Markov component.
fn value_against(
    game: &TabularMG,
    owner: Player,
    points: &[(Vec<Step>, usize)],
    choice: &[usize],
    component: &MarkovPolicy,
    history: &mut Vec<Step>,
    s: usize,
) -> f64 {
    let h = history.len();
    let idx = points.iter().position(|(hist, st)| hist == history && *st == s).unwrap();
    let x = choice[idx];
    let mut total = 0.0;
    for (y, &py) in component.dist(h, s).iter().enumerate() {
        if py == 0.0 {
            continue;
        }
        let (a, b) = match owner {
            Player::Min => (x, y),
            Player::Max => (y, x),
        };
        let mut v = game.reward(h, s, a, b);
        if h + 1 < game.horizon() {
            for (s_next, &p) in game.transition_row(h, s, a, b).iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                history.push((s, x, y));
                v += game.gamma() * p * value_against(game, owner, points, choice, component, history, s_next);
                history.pop();
            }
        }
        total += py * v;
    }
    total
}

/// Best value any pure history-dependent responder achieves against the
/// mixture owned by `owner`, by exhaustive enumeration.
pub fn brute_force_mixture_br(game: &TabularMG, mixture: &MixturePolicy, owner: Player) -> f64 {
    let mut points = Vec::new();
    decision_points(game, owner, &mut Vec::new(), game.initial_state(), &mut points);
    let n = owner.opponent().num_actions(game);
    let total = n.pow(points.len() as u32);
    assert!(total <= 1 << 20, "brute force too large: {total} policies");
    let mut best = match owner {
        Player::Min => f64::NEG_INFINITY,
        Player::Max => f64::INFINITY,
    };
    let mut choice = vec![0usize; points.len()];
    for code in 0..total {
        let mut c = code;
        for slot in choice.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let v: f64 = mixture
            .components()
            .iter()
            .zip(mixture.meta().probs())
            .map(|(comp, w)| w * value_against(game, owner, &points, &choice, comp, &mut Vec::new(), game.initial_state()))
            .sum();
        best = match owner {
            Player::Min => best.max(v),
            Player::Max => best.min(v),
        };
    }
    best
}
