//! Per-run results shared by both optimizers.

use std::collections::BTreeMap;

/// Spacing of periodic trace samples, in function evaluations.
pub const TRACE_INTERVAL: u64 = 1000;

/// One optimization trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    /// `(evaluations used, best cost so far)`, nondecreasing in the first
    /// component and nonincreasing in the second.
    pub trace: Vec<(u64, f64)>,
    pub fes_total: u64,
    pub restarts: u32,
    pub metadata: BTreeMap<String, String>,
}

impl RunRecord {
    /// Trace as CSV with header `fes,best_f`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("fes,best_f\n");
        for (fes, f) in &self.trace {
            out.push_str(&format!("{fes},{f:e}\n"));
        }
        out
    }
}

/// Tracks the best candidate seen and samples the convergence trace: every
/// improvement plus every [`TRACE_INTERVAL`] evaluations.
#[derive(Debug, Clone)]
pub struct Tracker {
    best_x: Vec<f64>,
    best_f: f64,
    trace: Vec<(u64, f64)>,
}

impl Tracker {
    pub fn new(dimension: usize) -> Self {
        Self {
            best_x: vec![0.0; dimension],
            best_f: f64::INFINITY,
            trace: Vec::new(),
        }
    }

    pub fn best_f(&self) -> f64 {
        self.best_f
    }

    pub fn best_x(&self) -> &[f64] {
        &self.best_x
    }

    /// Records the evaluation of `x` with cost `f`; `fes` is the counter value
    /// after that evaluation. Returns whether it improved the best.
    pub fn observe(&mut self, x: &[f64], f: f64, fes: u64) -> bool {
        let improved = f < self.best_f;
        if improved {
            self.best_f = f;
            self.best_x.copy_from_slice(x);
        }
        let periodic = fes % TRACE_INTERVAL == 0;
        if improved || periodic {
            match self.trace.last_mut() {
                Some(last) if last.0 == fes => last.1 = self.best_f,
                _ => self.trace.push((fes, self.best_f)),
            }
        }
        improved
    }

    pub fn finish(mut self, fes_total: u64, restarts: u32, metadata: BTreeMap<String, String>) -> RunRecord {
        if self.trace.last().map(|t| t.0) != Some(fes_total) && self.best_f.is_finite() {
            self.trace.push((fes_total, self.best_f));
        }
        RunRecord {
            best_x: self.best_x,
            best_f: self.best_f,
            trace: self.trace,
            fes_total,
            restarts,
            metadata,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_keeps_improvements_and_ticks() {
        let mut t = Tracker::new(1);
        assert!(t.observe(&[1.0], 5.0, 1));
        assert!(!t.observe(&[2.0], 6.0, 2));
        assert!(t.observe(&[3.0], 4.0, 3));
        for fes in 4..=1000 {
            t.observe(&[0.0], 10.0, fes);
        }
        let rec = t.finish(1500, 0, BTreeMap::new());
        assert_eq!(rec.trace, vec![(1, 5.0), (3, 4.0), (1000, 4.0), (1500, 4.0)]);
        assert_eq!(rec.best_x, vec![3.0]);
        assert!(rec.trace_csv().starts_with("fes,best_f\n1,5e0\n"));
    }
}
