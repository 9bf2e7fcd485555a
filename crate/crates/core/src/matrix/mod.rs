//! Zero-sum normal-form games.
//!
//! The row player maximizes and the column player minimizes the entry of the
//! payoff matrix. [`solve_lp`] returns an equilibrium together with its
//! achieved gap; [`solve_mwu`] approximates one by averaged multiplicative
//! weights.

mod mwu;
mod simplex;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

pub use mwu::{solve_mwu, solve_mwu_with_trace, DEFAULT_MWU_ETA, DEFAULT_MWU_ITERS};

/// Tolerance on `Σp = 1` for every probability vector in the crate.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Default gap tolerance for [`solve_lp`].
pub const DEFAULT_LP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    /// Row-major `rows × cols` matrix of payoffs to the row (max) player.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "payoff matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::mismatch("payoff entries", rows * cols, entries.len()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PayoffMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::mismatch("payoff row length", cols, bad.len()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    /// `m × n` matrix with entries i.i.d. uniform in `[-1, 1]`.
    pub fn random(rows: usize, cols: usize, rng: &mut Rng) -> Result<Self> {
        let entries = (0..rows * cols).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `f` entrywise; fails if the result is not finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.entries.iter().map(|&v| f(v)).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            entries.extend((0..self.rows).map(|i| self.get(i, j)));
        }
        PayoffMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// `A y`: expected payoff of each row against the column mixture `y`.
    pub fn row_payoffs(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.cols {
            return Err(Error::mismatch("column strategy", self.cols, y.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(y).map(|(a, p)| a * p).sum())
            .collect())
    }

    /// `xᵀ A`: expected payoff of each column against the row mixture `x`.
    pub fn col_payoffs(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::mismatch("row strategy", self.rows, x.len()));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &p) in x.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += p * a;
            }
        }
        Ok(out)
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let ay = self.row_payoffs(y)?;
        if x.len() != self.rows {
            return Err(Error::mismatch("row strategy", self.rows, x.len()));
        }
        Ok(x.iter().zip(&ay).map(|(p, v)| p * v).sum())
    }
}

/// A probability vector over a finite action set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_simplex(&probs, SIMPLEX_TOL)?;
        Ok(MixedStrategy(probs))
    }

    /// Normalizes nonnegative weights. Negative weights down to `-1e-9`
    /// relative to the total are rounding noise from a solver and are clamped.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty strategy".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        if let Some(w) = weights.iter().find(|&&w| w < -SIMPLEX_TOL * total) {
            return Err(Error::InvariantViolation(format!("negative weight {w}")));
        }
        for w in &mut weights {
            *w = w.max(0.0) / total;
        }
        Ok(MixedStrategy(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform strategy over an empty action set");
        MixedStrategy(vec![1.0 / n as f64; n])
    }

    pub fn pure(n: usize, action: usize) -> Self {
        assert!(action < n, "pure action {action} out of range {n}");
        let mut probs = vec![0.0; n];
        probs[action] = 1.0;
        MixedStrategy(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        sample_index(&self.0, rng)
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(value)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(value: MixedStrategy) -> Self {
        value.0
    }
}

pub(crate) fn validate_simplex(probs: &[f64], tol: f64) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidArgument("empty probability vector".into()));
    }
    if probs.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    if let Some(p) = probs.iter().find(|&&p| p < 0.0) {
        return Err(Error::InvariantViolation(format!("negative probability {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvariantViolation(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Inverse-CDF draw from a probability vector. Falls back to the last action
/// with positive mass when rounding leaves the cumulative sum short of `u`.
pub(crate) fn sample_index(probs: &[f64], rng: &mut Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixNashSolution {
    pub row_strategy: MixedStrategy,
    pub col_strategy: MixedStrategy,
    /// `xᵀ A y` for the returned pair.
    pub value: f64,
    /// Achieved gap, see [`matrix_exploitability`].
    pub eps: f64,
}

impl MatrixNashSolution {
    fn from_pair(a: &PayoffMatrix, x: MixedStrategy, y: MixedStrategy) -> Result<Self> {
        let value = a.bilinear(x.probs(), y.probs())?;
        let eps = matrix_exploitability(a, &x, &y)?;
        Ok(MatrixNashSolution {
            row_strategy: x,
            col_strategy: y,
            value,
            eps,
        })
    }
}

/// Equilibrium by linear programming.
///
/// The matrix is shifted so its smallest entry is 1, the column strategy is
/// read from the packing program `max 1ᵀw, A'w ≤ 1` and the row strategy from
/// its duals. The reported value is `xᵀAy` of the unshifted matrix.
pub fn solve_lp(a: &PayoffMatrix, tol: f64) -> Result<MatrixNashSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let shift = 1.0 - a.min_entry();
    let shifted: Vec<f64> = a.entries.iter().map(|v| v + shift).collect();
    let packing = simplex::solve_packing(a.rows, a.cols, &shifted).ok_or(Error::InfeasibleLp)?;
    if packing.objective.is_nan() || packing.objective <= 0.0 {
        return Err(Error::InfeasibleLp);
    }
    let y = MixedStrategy::from_weights(packing.primal).map_err(|_| Error::InfeasibleLp)?;
    let x = MixedStrategy::from_weights(packing.dual).map_err(|_| Error::InfeasibleLp)?;
    let solution = MatrixNashSolution::from_pair(a, x, y)?;
    if solution.eps > tol {
        return Err(Error::ToleranceNotMet {
            eps: solution.eps,
            tol,
        });
    }
    Ok(solution)
}

/// `max_i (A y)_i − min_j (xᵀ A)_j`, the duality gap of the pair `(x, y)`.
pub fn matrix_exploitability(a: &PayoffMatrix, x: &MixedStrategy, y: &MixedStrategy) -> Result<f64> {
    let best_row = a.row_payoffs(y.probs())?.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let best_col = a.col_payoffs(x.probs())?.into_iter().fold(f64::INFINITY, f64::min);
    Ok((best_row - best_col).max(0.0))
}

/// Lowest-index maximizer of `A y`.
pub fn pure_best_response_row(a: &PayoffMatrix, y: &MixedStrategy) -> Result<usize> {
    Ok(argmax(&a.row_payoffs(y.probs())?))
}

/// Lowest-index minimizer of `xᵀ A`.
pub fn pure_best_response_col(a: &PayoffMatrix, x: &MixedStrategy) -> Result<usize> {
    Ok(argmin(&a.col_payoffs(x.probs())?))
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    fn m(rows: &[&[f64]]) -> PayoffMatrix {
        PayoffMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Closed-form equilibrium of a 2×2 game without a saddle point.
    fn two_by_two_oracle(a: f64, b: f64, c: f64, d: f64) -> (f64, f64, f64) {
        let den = a + d - b - c;
        let value = (a * d - b * c) / den;
        let p = (d - c) / den; // row weight on action 0
        let q = (d - b) / den; // column weight on action 0
        (value, p, q)
    }

    #[test]
    fn matching_pennies() {
        let sol = solve_lp(&m(&[&[1.0, -1.0], &[-1.0, 1.0]]), DEFAULT_LP_TOL).unwrap();
        assert!(sol.value.abs() < 1e-12);
        assert!(close(sol.row_strategy.probs(), &[0.5, 0.5], 1e-12));
        assert!(close(sol.col_strategy.probs(), &[0.5, 0.5], 1e-12));
    }

    #[test]
    fn rock_paper_scissors() {
        let a = m(&[&[0.0, -1.0, 1.0], &[1.0, 0.0, -1.0], &[-1.0, 1.0, 0.0]]);
        let sol = solve_lp(&a, DEFAULT_LP_TOL).unwrap();
        let third = [1.0 / 3.0; 3];
        assert!(sol.value.abs() < 1e-12);
        assert!(close(sol.row_strategy.probs(), &third, 1e-12));
        assert!(close(sol.col_strategy.probs(), &third, 1e-12));
    }

    #[test]
    fn mixed_two_by_two_against_closed_form() {
        let (value, p, q) = two_by_two_oracle(2.0, -1.0, -1.0, 1.0);
        assert!((value - 0.2).abs() < 1e-15 && (p - 0.4).abs() < 1e-15 && (q - 0.4).abs() < 1e-15);
        let sol = solve_lp(&m(&[&[2.0, -1.0], &[-1.0, 1.0]]), DEFAULT_LP_TOL).unwrap();
        assert!((sol.value - value).abs() < 1e-12);
        assert!(close(sol.row_strategy.probs(), &[p, 1.0 - p], 1e-12));
        assert!(close(sol.col_strategy.probs(), &[q, 1.0 - q], 1e-12));
        assert!(sol.eps <= 1e-9);
    }

    #[test]
    fn dominant_action_gives_pure_equilibrium() {
        let sol = solve_lp(&m(&[&[1.0, 0.0], &[2.0, 1.0]]), DEFAULT_LP_TOL).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!(close(sol.row_strategy.probs(), &[0.0, 1.0], 1e-12));
        assert!(close(sol.col_strategy.probs(), &[0.0, 1.0], 1e-12));
    }

    #[test]
    fn degenerate_shapes() {
        let row = solve_lp(&m(&[&[3.0, -2.0, 5.0]]), DEFAULT_LP_TOL).unwrap();
        assert!((row.value + 2.0).abs() < 1e-12);
        assert!(close(row.col_strategy.probs(), &[0.0, 1.0, 0.0], 1e-12));
        let col = solve_lp(&m(&[&[3.0], &[-2.0], &[5.0]]), DEFAULT_LP_TOL).unwrap();
        assert!((col.value - 5.0).abs() < 1e-12);
        assert!(close(col.row_strategy.probs(), &[0.0, 0.0, 1.0], 1e-12));
        let one = solve_lp(&m(&[&[0.7]]), DEFAULT_LP_TOL).unwrap();
        assert_eq!(one.eps, 0.0);
        assert!((one.value - 0.7).abs() < 1e-15);
    }

    #[test]
    fn constant_matrix_is_solved() {
        let sol = solve_lp(&PayoffMatrix::zeros(3, 4).unwrap(), DEFAULT_LP_TOL).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.eps, 0.0);
    }

    #[test]
    fn rejects_non_finite_and_bad_tolerance() {
        assert!(matches!(
            PayoffMatrix::new(1, 2, vec![0.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
        let a = m(&[&[1.0]]);
        assert!(matches!(solve_lp(&a, 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exploitability_examples() {
        let mp = m(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let half = MixedStrategy::uniform(2);
        assert_eq!(matrix_exploitability(&mp, &half, &half).unwrap(), 0.0);
        let pure = MixedStrategy::pure(2, 0);
        assert_eq!(matrix_exploitability(&mp, &pure, &pure).unwrap(), 2.0);
        assert!(matches!(
            matrix_exploitability(&mp, &MixedStrategy::uniform(3), &half),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pure_best_responses() {
        let a = m(&[&[1.0, 0.0], &[2.0, 1.0]]);
        assert_eq!(pure_best_response_row(&a, &MixedStrategy::uniform(2)).unwrap(), 1);
        let z = PayoffMatrix::zeros(3, 3).unwrap();
        assert_eq!(pure_best_response_row(&z, &MixedStrategy::uniform(3)).unwrap(), 0);
        assert_eq!(pure_best_response_col(&z, &MixedStrategy::uniform(3)).unwrap(), 0);
        let mp = m(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(pure_best_response_row(&mp, &MixedStrategy::pure(2, 0)).unwrap(), 0);
        assert_eq!(pure_best_response_col(&mp, &MixedStrategy::pure(2, 0)).unwrap(), 1);
        assert!(pure_best_response_col(&mp, &MixedStrategy::uniform(3)).is_err());
    }

    #[test]
    fn random_games_meet_tolerance() {
        let mut rng = stream_rng(11, Stream::Benchmark);
        for _ in 0..200 {
            let a = PayoffMatrix::random(6, 6, &mut rng).unwrap();
            let sol = solve_lp(&a, DEFAULT_LP_TOL).unwrap();
            assert!(sol.eps <= 1e-9, "eps {}", sol.eps);
            assert!(sol.value >= a.min_entry() && sol.value <= a.max_entry());
        }
    }

    #[test]
    fn mixed_strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![1.5, -0.5]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        let w = MixedStrategy::from_weights(vec![2.0, -1e-15, 2.0]).unwrap();
        assert_eq!(w.probs(), &[0.5, 0.0, 0.5]);
        assert!(MixedStrategy::from_weights(vec![1.0, -0.5]).is_err());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(serde_json::from_str::<MixedStrategy>(&json).unwrap(), w);
        assert!(serde_json::from_str::<MixedStrategy>("[0.2,0.2]").is_err());
    }

    #[test]
    fn sampling_respects_support() {
        let mut rng = stream_rng(1, Stream::Rollout);
        let s = MixedStrategy::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert!((0..100).all(|_| s.sample(&mut rng) == 1));
    }
}
