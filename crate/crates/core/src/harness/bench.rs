//! Timing comparison of the matrix-game solvers.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::{solve_lp, solve_mwu, PayoffMatrix, DEFAULT_LP_TOL, DEFAULT_MWU_ETA, DEFAULT_MWU_ITERS};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverStats {
    pub mean_secs: f64,
    pub max_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub rows: usize,
    pub cols: usize,
    pub samples: usize,
    pub lp: SolverStats,
    pub mwu: SolverStats,
}

impl BenchReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{}x{} matrices, {} samples\nsolver  mean_seconds_per_sample  max_eps\n",
            self.rows, self.cols, self.samples
        );
        for (name, s) in [("lp", self.lp), ("mwu", self.mwu)] {
            out.push_str(&format!("{name:<7} {:<24.6e} {:.3e}\n", s.mean_secs, s.max_eps));
        }
        out
    }
}

/// Solves the same `samples` random `m × n` matrices with both solvers.
pub fn bench_solvers(m: usize, n: usize, samples: usize, seed: u64) -> Result<BenchReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = stream_rng(seed, Stream::Benchmark);
    let matrices = (0..samples).map(|_| PayoffMatrix::random(m, n, &mut rng)).collect::<Result<Vec<_>>>()?;
    let lp = time(&matrices, |a| Ok(solve_lp(a, DEFAULT_LP_TOL)?.eps))?;
    let mwu = time(&matrices, |a| Ok(solve_mwu(a, DEFAULT_MWU_ETA, DEFAULT_MWU_ITERS)?.eps))?;
    Ok(BenchReport {
        rows: m,
        cols: n,
        samples,
        lp,
        mwu,
    })
}

fn time(matrices: &[PayoffMatrix], solve: impl Fn(&PayoffMatrix) -> Result<f64>) -> Result<SolverStats> {
    let start = Instant::now();
    let mut max_eps: f64 = 0.0;
    for a in matrices {
        max_eps = max_eps.max(solve(a)?);
    }
    Ok(SolverStats {
        mean_secs: start.elapsed().as_secs_f64() / matrices.len() as f64,
        max_eps,
    })
}
