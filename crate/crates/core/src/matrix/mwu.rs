use super::{MatrixNashSolution, MixedStrategy, PayoffMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_MWU_ETA: f64 = 0.1;
pub const DEFAULT_MWU_ITERS: usize = 10_000;

/// Multiplicative weights for both players from uniform starts.
///
/// Both players update simultaneously against the opponent's previous
/// iterate; the returned strategies are the averages of the iterates played
/// in rounds `0..iters`. The gap is whatever the averages achieve.
pub fn solve_mwu(a: &PayoffMatrix, eta: f64, iters: usize) -> Result<MatrixNashSolution> {
    solve_mwu_with_trace(a, eta, iters, |_, _| {})
}

/// [`solve_mwu`] that hands every iterate pair to `observe`.
pub fn solve_mwu_with_trace(
    a: &PayoffMatrix,
    eta: f64,
    iters: usize,
    mut observe: impl FnMut(&[f64], &[f64]),
) -> Result<MatrixNashSolution> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("iters must be at least 1".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    // Cumulative exponents; the iterates are their softmax, which avoids
    // underflow when a dominated action's weight decays for many rounds.
    let mut row_logits = vec![0.0; m];
    let mut col_logits = vec![0.0; n];
    let mut x = vec![1.0 / m as f64; m];
    let mut y = vec![1.0 / n as f64; n];
    let mut x_sum = vec![0.0; m];
    let mut y_sum = vec![0.0; n];
    for _ in 0..iters {
        observe(&x, &y);
        for (s, v) in x_sum.iter_mut().zip(&x) {
            *s += v;
        }
        for (s, v) in y_sum.iter_mut().zip(&y) {
            *s += v;
        }
        let ay = a.row_payoffs(&y)?;
        let xa = a.col_payoffs(&x)?;
        for (l, g) in row_logits.iter_mut().zip(&ay) {
            *l += eta * g;
        }
        for (l, g) in col_logits.iter_mut().zip(&xa) {
            *l -= eta * g;
        }
        softmax_into(&row_logits, &mut x);
        softmax_into(&col_logits, &mut y);
    }
    let x = MixedStrategy::from_weights(x_sum)?;
    let y = MixedStrategy::from_weights(y_sum)?;
    MatrixNashSolution::from_pair(a, x, y)
}

fn softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}
