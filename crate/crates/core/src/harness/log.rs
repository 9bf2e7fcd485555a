//! Exploitability logs and their CSV form.

use std::path::Path;

use super::config::Algorithm;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "algorithm,seed,episode,exploitability,wall_time_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub episode: u64,
    pub exploitability: f64,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub rows: Vec<LogRow>,
}

impl RunLog {
    pub fn new(rows: Vec<LogRow>) -> Self {
        RunLog { rows }
    }

    /// Orders rows by `(algorithm, seed, episode)`.
    pub fn sort(&mut self) {
        self.rows
            .sort_by_key(|x| (x.algorithm, x.seed, x.episode));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:?},{}\n",
                r.algorithm, r.seed, r.episode, r.exploitability, r.wall_time_ms
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(Error::MalformedInput("unexpected CSV header".into()));
        }
        let bad = |line: &str| Error::MalformedInput(format!("bad CSV row `{line}`"));
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let [alg, seed, episode, value, wall] = fields[..] else {
                return Err(bad(line));
            };
            rows.push(LogRow {
                algorithm: alg.parse().map_err(|_| bad(line))?,
                seed: seed.parse().map_err(|_| bad(line))?,
                episode: episode.parse().map_err(|_| bad(line))?,
                exploitability: value.parse().map_err(|_| bad(line))?,
                wall_time_ms: wall.parse().map_err(|_| bad(line))?,
            });
        }
        Ok(RunLog { rows })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    /// `(episode, value)` series of one run.
    pub fn series(&self, algorithm: Algorithm, seed: u64) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.seed == seed)
            .map(|r| (r.episode, r.exploitability))
            .collect()
    }

    /// Algorithms in first-appearance order.
    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut out: Vec<Algorithm> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.algorithm) {
                out.push(r.algorithm);
            }
        }
        out
    }

    pub fn seeds(&self, algorithm: Algorithm) -> Vec<u64> {
        let mut out: Vec<u64> = self.rows.iter().filter(|r| r.algorithm == algorithm).map(|r| r.seed).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// First logged episode at which the run's exploitability is at most
    /// `threshold`.
    pub fn episodes_to_reach(&self, algorithm: Algorithm, seed: u64, threshold: f64) -> Option<u64> {
        self.series(algorithm, seed).into_iter().find(|&(_, v)| v <= threshold).map(|(e, _)| e)
    }
}

/// Mean over the trailing `window` episodes (inclusive of the current point).
pub fn smooth_trailing(series: &[(u64, f64)], window: u64) -> Vec<(u64, f64)> {
    series
        .iter()
        .map(|&(e, _)| {
            let lo = e.saturating_sub(window.saturating_sub(1));
            let inside: Vec<f64> = series.iter().filter(|(x, _)| *x >= lo && *x <= e).map(|&(_, v)| v).collect();
            (e, inside.iter().sum::<f64>() / inside.len() as f64)
        })
        .collect()
}
