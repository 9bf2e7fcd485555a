//! Dense tableau simplex for the packing program `max 1ᵀw  s.t.  M w ≤ 1, w ≥ 0`.
//!
//! With `M` strictly positive the slack basis is feasible at the origin and the
//! program is bounded, so phase one is never needed. The optimal duals of the
//! packing constraints solve the covering program `min 1ᵀu  s.t.  Mᵀu ≥ 1`.

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone)]
pub(crate) struct PackingSolution {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: usize,
    width: usize,
    cells: Vec<f64>,
    objective: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(rows: usize, cols: usize, matrix: &[f64]) -> Self {
        let width = cols + rows + 1;
        let mut cells = vec![0.0; rows * width];
        for i in 0..rows {
            let line = &mut cells[i * width..(i + 1) * width];
            line[..cols].copy_from_slice(&matrix[i * cols..(i + 1) * cols]);
            line[cols + i] = 1.0;
            line[width - 1] = 1.0;
        }
        let mut objective = vec![0.0; width];
        objective[..cols].iter_mut().for_each(|c| *c = -1.0);
        Tableau {
            rows,
            width,
            cells,
            objective,
            basis: (cols..cols + rows).collect(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let costs = &self.objective[..self.width - 1];
        if bland {
            return costs.iter().position(|&c| c < -PIVOT_EPS);
        }
        let mut best: Option<(usize, f64)> = None;
        for (j, &c) in costs.iter().enumerate() {
            if c < -PIVOT_EPS && best.is_none_or(|(_, b)| c < b) {
                best = Some((j, c));
            }
        }
        best.map(|(j, _)| j)
    }

    fn leaving(&self, col: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a <= PIVOT_EPS {
                continue;
            }
            let ratio = self.rhs(i) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((k, r)) => {
                    let tie = (ratio - r).abs() <= PIVOT_EPS * r.abs().max(1.0);
                    let better = if tie {
                        // Bland's rule breaks ratio ties by smallest basic index.
                        bland && self.basis[i] < self.basis[k]
                    } else {
                        ratio < r
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((k, r))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for v in &mut self.cells[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.cells[row * w..(row + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let factor = self.at(i, col);
            if factor == 0.0 {
                continue;
            }
            let line = &mut self.cells[i * w..(i + 1) * w];
            for (v, &pv) in line.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            line[col] = 0.0;
        }
        let factor = self.objective[col];
        if factor != 0.0 {
            for (v, &pv) in self.objective.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.objective[col] = 0.0;
        }
        self.basis[row] = col;
    }
}

/// Returns `None` only if the pivot limit is hit or the program looks
/// unbounded, neither of which can happen for a strictly positive matrix.
pub(crate) fn solve_packing(rows: usize, cols: usize, matrix: &[f64]) -> Option<PackingSolution> {
    debug_assert_eq!(matrix.len(), rows * cols);
    let mut tab = Tableau::new(rows, cols, matrix);
    // Dantzig's rule is fast on these tiny dense programs; Bland's rule takes
    // over after a run of degenerate pivots to rule out cycling.
    let mut degenerate_run = 0usize;
    let mut bland = false;
    for _ in 0..MAX_PIVOTS {
        let Some(col) = tab.entering(bland) else {
            let mut primal = vec![0.0; cols];
            for (i, &b) in tab.basis.iter().enumerate() {
                if b < cols {
                    primal[b] = tab.rhs(i);
                }
            }
            let dual = tab.objective[cols..cols + rows].to_vec();
            let objective = tab.objective[tab.width - 1];
            return Some(PackingSolution {
                primal,
                dual,
                objective,
            });
        };
        let row = tab.leaving(col, bland)?;
        if tab.rhs(row).abs() <= PIVOT_EPS {
            degenerate_run += 1;
            if degenerate_run > rows + cols {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        tab.pivot(row, col);
    }
    None
}
