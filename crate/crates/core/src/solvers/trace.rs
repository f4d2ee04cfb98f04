use std::fmt;
use std::time::Instant;

use crate::Real;

/// Why an iteration loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    /// The data residual dropped to `τδ`.
    Discrepancy,
    MaxIter,
    /// No further progress: functional changes below tolerance, a failed line
    /// search, or a failed inner solve.
    Stagnation,
    /// The gradient norm reached the configured tolerance (Newton only).
    GradientTolerance,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Discrepancy => "discrepancy",
            StopReason::MaxIter => "max_iter",
            StopReason::Stagnation => "stagnation",
            StopReason::GradientTolerance => "gradient_tol",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub iter: usize,
    /// Data-space residual norm in the method's own forward model.
    pub residual: T,
    pub functional: T,
    pub rel_error: Option<T>,
    /// Seconds since the solver started.
    pub wall_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<T> {
    pub rows: Vec<TraceRow<T>>,
    pub stop_reason: StopReason,
    pub n_star: usize,
    /// FISTA iterations spent building the initial iterate.
    pub warm_start_iterations: usize,
    /// Native-variable iterates, when recording was requested.
    pub iterates: Option<Vec<Vec<T>>>,
}

impl<T: Real> IterationTrace<T> {
    pub fn final_row(&self) -> &TraceRow<T> {
        self.rows.last().expect("a trace always holds the initial row")
    }

    pub fn final_residual(&self) -> T {
        self.final_row().residual
    }

    pub fn wall_seconds(&self) -> f64 {
        self.final_row().wall_s
    }
}

/// Records trace rows, keeps the clock and watches for stagnation.
pub(crate) struct Recorder<T> {
    start: Instant,
    rows: Vec<TraceRow<T>>,
    iterates: Option<Vec<Vec<T>>>,
    stagnation_tol: T,
    stagnation_window: usize,
    quiet_streak: usize,
    warm_start_iterations: usize,
}

impl<T: Real> Recorder<T> {
    pub fn new(record_iterates: bool, stagnation_tol: T, stagnation_window: usize) -> Self {
        Self {
            start: Instant::now(),
            rows: Vec::new(),
            iterates: record_iterates.then(Vec::new),
            stagnation_tol,
            stagnation_window,
            quiet_streak: 0,
            warm_start_iterations: 0,
        }
    }

    pub fn set_warm_start(&mut self, iterations: usize) {
        self.warm_start_iterations = iterations;
    }

    pub fn push(&mut self, x: &[T], residual: T, functional: T, rel_error: Option<T>) {
        if let Some(prev) = self.rows.last() {
            let change = (prev.functional - functional).abs();
            if change <= self.stagnation_tol * prev.functional.abs() {
                self.quiet_streak += 1;
            } else {
                self.quiet_streak = 0;
            }
        }
        let wall_s = self.start.elapsed().as_secs_f64();
        let wall_s = self.rows.last().map_or(wall_s, |r| r.wall_s.max(wall_s));
        self.rows.push(TraceRow {
            iter: self.rows.len(),
            residual,
            functional,
            rel_error,
            wall_s,
        });
        if let Some(iterates) = self.iterates.as_mut() {
            iterates.push(x.to_vec());
        }
    }

    pub fn last_residual(&self) -> T {
        self.rows.last().map_or(T::infinity(), |r| r.residual)
    }

    pub fn last_functional(&self) -> T {
        self.rows.last().map_or(T::infinity(), |r| r.functional)
    }

    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn stagnated(&self) -> bool {
        self.quiet_streak >= self.stagnation_window
    }

    pub fn finish(self, stop_reason: StopReason) -> IterationTrace<T> {
        let n_star = self.iterations();
        IterationTrace {
            rows: self.rows,
            stop_reason,
            n_star,
            warm_start_iterations: self.warm_start_iterations,
            iterates: self.iterates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stagnation_needs_full_window() {
        let mut rec = Recorder::new(false, 1e-14, 3);
        rec.push(&[], 1.0, 2.0, None);
        for _ in 0..2 {
            rec.push(&[], 1.0, 2.0, None);
        }
        assert!(!rec.stagnated());
        rec.push(&[], 1.0, 2.0, None);
        assert!(rec.stagnated());
        rec.push(&[], 1.0, 1.0, None);
        assert!(!rec.stagnated());
        let trace = rec.finish(StopReason::MaxIter);
        assert_eq!(trace.n_star, 4);
        assert!(trace.rows.iter().enumerate().all(|(i, r)| r.iter == i));
    }
}
