mod common;

use nashmg::game::TransitionSample;
use nashmg::learners::{nash_vi_train, EmpiricalModel, EpsilonSchedule, NashViConfig};
use nashmg::oracle::{exact_nash_solve, policy_value};
use nashmg::rng::{stream_rng, Stream};
use nashmg::{generate_random_mg, rollout};

#[test]
fn monte_carlo_returns_match_policy_value() {
    let game = generate_random_mg(3, 3, 3, 3, 21).unwrap();
    let mut rng = stream_rng(21, Stream::Evaluation);
    let mu = common::random_markov(3, 3, 3, &mut rng);
    let nu = common::random_markov(3, 3, 3, &mut rng);
    let exact = policy_value(&game, &mu, &nu).unwrap().get(0, 0);
    let n = 100_000;
    let mut rng = stream_rng(21, Stream::Rollout);
    let mean = (0..n).map(|_| rollout(&game, &mu, &nu, &mut rng).unwrap().ret).sum::<f64>() / n as f64;
    assert!((mean - exact).abs() <= 0.02, "{mean} vs {exact}");
}

#[test]
fn next_state_frequencies_match_transition_row() {
    let game = generate_random_mg(4, 2, 2, 2, 5).unwrap();
    let sim = game.simulator();
    let mut rng = stream_rng(5, Stream::Rollout);
    let n = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        counts[sim.step(0, 1, 1, 0, &mut rng).next_state] += 1;
    }
    let row = game.transition_row(0, 1, 1, 0);
    let tv: f64 = 0.5 * counts.iter().zip(row).map(|(&c, p)| (c as f64 / n as f64 - p).abs()).sum::<f64>();
    assert!(tv <= 0.02, "TV distance {tv}");
}

#[test]
fn empirical_model_converges_under_uniform_play() {
    let game = generate_random_mg(2, 2, 2, 2, 9).unwrap();
    let dims = game.dims();
    let sim = game.simulator();
    let mut rng = stream_rng(9, Stream::Learner);
    let mut model = EmpiricalModel::new(dims);
    let uniform = nashmg::MarkovPolicy::uniform(2, 2, 2);
    for _ in 0..1_000_000 {
        let mut s = sim.reset();
        for h in 0..dims.horizon {
            let a = uniform.sample(h, s, &mut rng);
            let b = uniform.sample(h, s, &mut rng);
            let out = sim.step(h, s, a, b, &mut rng);
            model.record(&TransitionSample {
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
    }
    // Only the initial state is reachable at the first step.
    let reachable = |h: usize, s: usize| h > 0 || s == game.initial_state();
    let mut row = vec![0.0; dims.states];
    for h in 0..dims.horizon {
        for s in (0..dims.states).filter(|&s| reachable(h, s)) {
            for a in 0..2 {
                for b in 0..2 {
                    assert!(model.visits(h, s, a, b) > 0);
                    assert!((model.reward_estimate(h, s, a, b) - game.reward(h, s, a, b)).abs() <= 0.01);
                    if h + 1 < dims.horizon {
                        model.transition_estimate(h, s, a, b, &mut row);
                        let p = game.transition_row(h, s, a, b);
                        let tv: f64 = 0.5 * row.iter().zip(p).map(|(x, p)| (x - p).abs()).sum::<f64>();
                        assert!(tv <= 0.01, "TV {tv} at h={h} s={s} a={a} b={b}");
                    }
                }
            }
        }
    }

    // The same amount of uniform data through the learner, swept once at the end.
    let cfg = NashViConfig {
        schedule: EpsilonSchedule::constant(1.0).unwrap(),
        update_interval: 2 * 1_000_000,
        ..NashViConfig::new(dims, 1_000_000)
    };
    let state = nash_vi_train(game.simulator(), &cfg, &mut stream_rng(10, Stream::Learner), None).unwrap();
    let exact = exact_nash_solve(&game).unwrap();
    for h in 0..dims.horizon {
        for s in (0..dims.states).filter(|&s| reachable(h, s)) {
            for (q, q_star) in state.q.block(h, s).iter().zip(exact.q_star.block(h, s)) {
                assert!((q - q_star).abs() <= 0.05, "{q} vs {q_star}");
            }
        }
    }
}
