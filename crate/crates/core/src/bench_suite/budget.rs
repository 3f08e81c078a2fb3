use crate::error::{Error, Result};

/// Function-evaluation counter with a hard cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    max_fes: u64,
    used: u64,
}

impl EvalBudget {
    pub fn new(max_fes: u64) -> Self {
        Self { max_fes, used: 0 }
    }

    /// The standard allowance of `10_000 × dimension` evaluations.
    pub fn standard(dimension: usize) -> Self {
        Self::with_multiplier(dimension, 10_000)
    }

    pub fn with_multiplier(dimension: usize, multiplier: u64) -> Self {
        Self::new(multiplier * dimension as u64)
    }

    pub fn max_fes(&self) -> u64 {
        self.max_fes
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max_fes - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_fes
    }

    /// Fraction of the allowance already spent, in `[0, 1]`.
    pub fn progress(&self) -> f64 {
        if self.max_fes == 0 {
            1.0
        } else {
            self.used as f64 / self.max_fes as f64
        }
    }

    /// Consumes one evaluation.
    pub fn charge(&mut self) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted { max_fes: self.max_fes });
        }
        self.used += 1;
        Ok(())
    }
}
