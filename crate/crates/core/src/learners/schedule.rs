use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    Constant,
    Exponential,
}

/// Exploration rate `ε(t) = ε₁ + (ε₀ − ε₁)·exp(−t/p)`, or `ε₀` when constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub eps0: f64,
    pub eps1: f64,
    pub decay: f64,
    pub mode: ScheduleMode,
}

impl EpsilonSchedule {
    pub fn constant(eps: f64) -> Result<Self> {
        Self::new(eps, eps, 1.0, ScheduleMode::Constant)
    }

    pub fn exponential(eps0: f64, eps1: f64, decay: f64) -> Result<Self> {
        Self::new(eps0, eps1, decay, ScheduleMode::Exponential)
    }

    pub fn new(eps0: f64, eps1: f64, decay: f64, mode: ScheduleMode) -> Result<Self> {
        for e in [eps0, eps1] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidArgument(format!("epsilon {e} outside [0, 1]")));
            }
        }
        if !decay.is_finite() || decay <= 0.0 {
            return Err(Error::InvalidArgument(format!("decay scale must be positive, got {decay}")));
        }
        Ok(EpsilonSchedule {
            eps0,
            eps1,
            decay,
            mode,
        })
    }

    pub fn at(&self, t: u64) -> f64 {
        match self.mode {
            ScheduleMode::Constant => self.eps0,
            ScheduleMode::Exponential => {
                let e = self.eps1 + (self.eps0 - self.eps1) * (-(t as f64) / self.decay).exp();
                e.clamp(0.0, 1.0)
            }
        }
    }
}
