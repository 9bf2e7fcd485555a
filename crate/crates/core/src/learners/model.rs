use crate::game::{GameDims, TransitionSample};

/// Visit counts and reward sums from which `P̃` and `r̃` are estimated.
///
/// Unvisited `(h, s, a, b)` estimate to a uniform next-state distribution and
/// zero reward.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalModel {
    dims: GameDims,
    visits: Vec<u64>,
    next_counts: Vec<u64>,
    reward_sums: Vec<f64>,
}

impl EmpiricalModel {
    pub fn new(dims: GameDims) -> Self {
        let pairs = dims.horizon * dims.states * dims.actions_max * dims.actions_min;
        let moving = (dims.horizon - 1) * dims.states * dims.actions_max * dims.actions_min;
        EmpiricalModel {
            dims,
            visits: vec![0; pairs],
            next_counts: vec![0; moving * dims.states],
            reward_sums: vec![0.0; pairs],
        }
    }

    #[inline]
    fn index(&self, h: usize, s: usize, a: usize, b: usize) -> usize {
        ((h * self.dims.states + s) * self.dims.actions_max + a) * self.dims.actions_min + b
    }

    pub fn record(&mut self, t: &TransitionSample) {
        let i = self.index(t.h, t.s, t.a, t.b);
        self.visits[i] += 1;
        self.reward_sums[i] += t.r;
        if !t.done {
            self.next_counts[i * self.dims.states + t.s_next] += 1;
        }
    }

    pub fn visits(&self, h: usize, s: usize, a: usize, b: usize) -> u64 {
        self.visits[self.index(h, s, a, b)]
    }

    pub fn next_counts(&self, h: usize, s: usize, a: usize, b: usize) -> &[u64] {
        let n = self.dims.states;
        let i = self.index(h, s, a, b) * n;
        &self.next_counts[i..i + n]
    }

    pub fn reward_estimate(&self, h: usize, s: usize, a: usize, b: usize) -> f64 {
        let i = self.index(h, s, a, b);
        match self.visits[i] {
            0 => 0.0,
            n => self.reward_sums[i] / n as f64,
        }
    }

    /// Writes `P̃[h][s][a][b]` into `out` (length `S`); `h` must not be the last step.
    pub fn transition_estimate(&self, h: usize, s: usize, a: usize, b: usize, out: &mut [f64]) {
        let n = self.visits(h, s, a, b);
        if n == 0 {
            out.fill(1.0 / self.dims.states as f64);
            return;
        }
        for (o, &c) in out.iter_mut().zip(self.next_counts(h, s, a, b)) {
            *o = c as f64 / n as f64;
        }
    }

    pub fn dims(&self) -> GameDims {
        self.dims
    }
}
