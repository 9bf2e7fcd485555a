//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::learners::{EpsilonSchedule, ScheduleMode};
use crate::oracle::DEFAULT_NODE_BUDGET;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    NashVi,
    NashViExploiter,
    NashQ,
    SelfPlay,
    Fsp,
    DoubleOracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::NashVi,
        Algorithm::NashViExploiter,
        Algorithm::NashQ,
        Algorithm::SelfPlay,
        Algorithm::Fsp,
        Algorithm::DoubleOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NashVi => "nash_vi",
            Algorithm::NashViExploiter => "nash_vi_exploiter",
            Algorithm::NashQ => "nash_q",
            Algorithm::SelfPlay => "sp",
            Algorithm::Fsp => "fsp",
            Algorithm::DoubleOracle => "do",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Algorithm::SelfPlay | Algorithm::Fsp | Algorithm::DoubleOracle)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    ApproxExploiter,
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(EvalMode::Exact),
            "approx_exploiter" | "approx" => Ok(EvalMode::ApproxExploiter),
            _ => Err(Error::Config(format!("unknown eval mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSource {
    File(PathBuf),
    Generate {
        states: usize,
        actions_max: usize,
        actions_min: usize,
        horizon: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvSource,
    pub algorithms: Vec<Algorithm>,
    pub episodes: u64,
    /// Overrides the environment's discount when set.
    pub gamma: Option<f64>,
    /// Learner exploration; each learner's default when unset.
    pub schedule: Option<EpsilonSchedule>,
    pub alpha: f64,
    pub update_interval: Option<u64>,
    pub eval_every: u64,
    pub eval_mode: EvalMode,
    pub seeds: Vec<u64>,
    pub br_episodes: u64,
    /// Early stop for best-response phases: `(window, threshold)`.
    pub br_early_stop: Option<(usize, f64)>,
    pub meta_eval_episodes: u64,
    pub exploiter_episodes: u64,
    pub exploiter_eval_episodes: u64,
    pub node_budget: usize,
    /// Trailing window, in episodes, for smoothing approximate curves.
    pub smoothing_window: u64,
    pub log_scale: bool,
    pub record_wall_time: bool,
    /// Artifact directory, relative to the base directory.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvSource::Generate {
                states: 3,
                actions_max: 3,
                actions_min: 3,
                horizon: 3,
                seed: 0,
            },
            algorithms: vec![Algorithm::NashVi],
            episodes: 50_000,
            gamma: None,
            schedule: None,
            alpha: 0.1,
            update_interval: None,
            eval_every: 250,
            eval_mode: EvalMode::Exact,
            seeds: vec![0],
            br_episodes: 1000,
            br_early_stop: None,
            meta_eval_episodes: 100,
            exploiter_episodes: 5000,
            exploiter_eval_episodes: 10_000,
            node_budget: DEFAULT_NODE_BUDGET,
            smoothing_window: 100,
            log_scale: false,
            record_wall_time: false,
            output_dir: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse(key, v))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let mut cfg = ExperimentConfig::default();
        let mut generator = (3usize, 3usize, 3usize, 3usize, 0u64);
        let mut generator_given = false;
        let mut env_file = None;
        let (mut mode, mut eps0, mut eps1, mut decay) = (None, None, None, None);
        let (mut stop_window, mut stop_threshold) = (None, None);
        for (key, value) in &entries {
            let (k, v) = (key.as_str(), value.as_str());
            match k {
                "env_file" => env_file = Some(PathBuf::from(v)),
                "states" => (generator.0, generator_given) = (parse(k, v)?, true),
                "actions_max" => (generator.1, generator_given) = (parse(k, v)?, true),
                "actions_min" => (generator.2, generator_given) = (parse(k, v)?, true),
                "horizon" => (generator.3, generator_given) = (parse(k, v)?, true),
                "env_seed" => (generator.4, generator_given) = (parse(k, v)?, true),
                "algorithm" | "algorithms" => cfg.algorithms = parse_list(k, v)?,
                "episodes" => cfg.episodes = parse(k, v)?,
                "gamma" => cfg.gamma = Some(parse(k, v)?),
                "epsilon_mode" => {
                    mode = Some(match v {
                        "constant" => ScheduleMode::Constant,
                        "exponential" => ScheduleMode::Exponential,
                        _ => return Err(Error::Config(format!("unknown epsilon mode `{v}`"))),
                    })
                }
                "epsilon0" | "epsilon" => eps0 = Some(parse::<f64>(k, v)?),
                "epsilon1" => eps1 = Some(parse::<f64>(k, v)?),
                "epsilon_decay" => decay = Some(parse::<f64>(k, v)?),
                "alpha" => cfg.alpha = parse(k, v)?,
                "update_interval" => cfg.update_interval = Some(parse(k, v)?),
                "eval_every" => cfg.eval_every = parse(k, v)?,
                "eval_mode" => cfg.eval_mode = parse(k, v)?,
                "seeds" | "seed" => cfg.seeds = parse_list(k, v)?,
                "br_episodes" => cfg.br_episodes = parse(k, v)?,
                "br_stop_window" => stop_window = Some(parse::<usize>(k, v)?),
                "br_stop_threshold" => stop_threshold = Some(parse::<f64>(k, v)?),
                "meta_eval_episodes" => cfg.meta_eval_episodes = parse(k, v)?,
                "exploiter_episodes" => cfg.exploiter_episodes = parse(k, v)?,
                "exploiter_eval_episodes" => cfg.exploiter_eval_episodes = parse(k, v)?,
                "node_budget" => cfg.node_budget = parse(k, v)?,
                "smoothing_window" => cfg.smoothing_window = parse(k, v)?,
                "log_scale" => cfg.log_scale = parse(k, v)?,
                "record_wall_time" => cfg.record_wall_time = parse(k, v)?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(v)),
                _ => return Err(Error::Config(format!("unknown key `{k}`"))),
            }
        }
        cfg.env = match (env_file, generator_given) {
            (Some(_), true) => return Err(Error::Config("give either env_file or generator parameters, not both".into())),
            (Some(path), false) => EnvSource::File(path),
            (None, _) => EnvSource::Generate {
                states: generator.0,
                actions_max: generator.1,
                actions_min: generator.2,
                horizon: generator.3,
                seed: generator.4,
            },
        };
        if mode.is_some() || eps0.is_some() || eps1.is_some() || decay.is_some() {
            let mode = mode.unwrap_or(ScheduleMode::Constant);
            let eps0 = eps0.unwrap_or(if mode == ScheduleMode::Constant { 0.5 } else { 1.0 });
            let schedule = EpsilonSchedule::new(eps0, eps1.unwrap_or(0.0), decay.unwrap_or(8000.0), mode)
                .map_err(|e| Error::Config(e.to_string()))?;
            cfg.schedule = Some(schedule);
        }
        cfg.br_early_stop = match (stop_window, stop_threshold) {
            (None, None) => None,
            (Some(w), Some(t)) if w > 0 && t.is_finite() => Some((w, t)),
            _ => return Err(Error::Config("br_stop_window (positive) and br_stop_threshold go together".into())),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.algorithms.is_empty() {
            return fail("no algorithm given".into());
        }
        if self.seeds.is_empty() {
            return fail("no seeds given".into());
        }
        if let EnvSource::Generate {
            states,
            actions_max,
            actions_min,
            horizon,
            ..
        } = self.env
        {
            if states == 0 || actions_max == 0 || actions_min == 0 || horizon == 0 {
                return fail("environment sizes must be positive".into());
            }
        }
        for (name, v) in [
            ("eval_every", self.eval_every),
            ("br_episodes", self.br_episodes),
            ("meta_eval_episodes", self.meta_eval_episodes),
            ("exploiter_episodes", self.exploiter_episodes),
            ("exploiter_eval_episodes", self.exploiter_eval_episodes),
        ] {
            if v == 0 {
                return fail(format!("`{name}` must be positive"));
            }
        }
        if self.update_interval == Some(0) {
            return fail("`update_interval` must be positive".into());
        }
        if self.node_budget == 0 {
            return fail("`node_budget` must be positive".into());
        }
        if !self.episodes.is_multiple_of(self.eval_every) {
            return fail(format!("eval_every = {} does not divide episodes = {}", self.eval_every, self.episodes));
        }
        if self.algorithms.iter().any(|a| a.is_baseline()) && !self.episodes.is_multiple_of(self.br_episodes) {
            return fail(format!("br_episodes = {} does not divide episodes = {}", self.br_episodes, self.episodes));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) {
                return fail(format!("gamma {g} outside [0, 1]"));
            }
        }
        Ok(())
    }
}
