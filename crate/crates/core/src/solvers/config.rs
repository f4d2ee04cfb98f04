use crate::error::{Error, Result};
use crate::Real;

/// Step size of the proximal-gradient methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize<T> {
    /// `0.9/‖A‖₂²`, with the norm estimated by 100 power iterations.
    Auto,
    Fixed(T),
}

/// Momentum rule of the accelerated proximal-gradient method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Momentum<T> {
    /// `t_k = (1 + √(1 + 4t²_{k−1}))/2`, coefficient `(t_{k−1} − 1)/t_k`.
    Nesterov,
    /// Coefficient `(k − 1)/(k + β − 1)` with `β ≥ 3`.
    Beta(T),
}

/// Backtracking parameters: the accepted step is the largest
/// `initial_step·shrink^m` satisfying the sufficient-decrease condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Armijo<T> {
    pub initial_step: T,
    pub shrink: T,
    pub slope: T,
    pub max_backtracks: usize,
}

impl<T: Real> Default for Armijo<T> {
    fn default() -> Self {
        Self {
            initial_step: T::one(),
            shrink: T::lit(0.5),
            slope: T::lit(1e-4),
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Smoothing parameter. `None` picks the method default: `10⁻⁴·δ` for
    /// Newton (or `10⁻⁸·‖y^δ‖` when `δ = 0`), the exact transform otherwise.
    pub epsilon: Option<T>,
    /// Discrepancy factor, must exceed 1.
    pub tau: T,
    pub omega: StepSize<T>,
    pub momentum: Momentum<T>,
    pub armijo: Armijo<T>,
    /// Initial Levenberg–Marquardt shift; `None` uses `δ`.
    pub lm_alpha0: Option<T>,
    /// Geometric decay `q` of the shift sequence `α_n = q^n α₀`.
    pub lm_decay: T,
    pub lm_alpha_floor: T,
    pub max_iter: usize,
    /// Relative residual tolerance of the inner CG solves.
    pub inner_tol: T,
    /// Iteration cap of the inner CG solves; `None` uses twice the dimension.
    pub inner_max_iter: Option<usize>,
    /// Newton exits once `‖∇J^ε‖₂` drops to this value.
    pub grad_tol: T,
    pub stagnation_tol: T,
    pub stagnation_window: usize,
    /// Initial iterate in the method's native variable; zero when `None`.
    pub x0: Option<Vec<T>>,
    /// Number of FISTA iterations used to build the initial iterate (0 disables).
    pub warm_start_iters: usize,
    /// Keep every iterate in the trace.
    pub record_iterates: bool,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: None,
            tau: T::lit(1.1),
            omega: StepSize::Auto,
            momentum: Momentum::Nesterov,
            armijo: Armijo::default(),
            lm_alpha0: None,
            lm_decay: T::lit(0.6),
            lm_alpha_floor: T::lit(1e-14),
            max_iter: 10_000,
            inner_tol: T::lit(1e-10),
            inner_max_iter: None,
            grad_tol: T::lit(1e-10),
            stagnation_tol: T::lit(1e-14),
            stagnation_window: 10,
            x0: None,
            warm_start_iters: 0,
            record_iterates: false,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > T::one()) {
            return Err(invalid(format!("tau must exceed 1, got {}", self.tau)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= T::zero()) || !eps.is_finite() {
                return Err(invalid(format!("epsilon must be nonnegative, got {eps}")));
            }
        }
        if let StepSize::Fixed(w) = self.omega {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(invalid(format!("omega must be positive, got {w}")));
            }
        }
        if let Momentum::Beta(b) = self.momentum {
            if !(b >= T::lit(3.0)) {
                return Err(invalid(format!("beta must be at least 3, got {b}")));
            }
        }
        let a = &self.armijo;
        if !(a.initial_step > T::zero()) {
            return Err(invalid("armijo initial step must be positive"));
        }
        if !(a.shrink > T::zero() && a.shrink < T::one()) {
            return Err(invalid("armijo shrink factor must lie in (0, 1)"));
        }
        if !(a.slope > T::zero() && a.slope < T::one()) {
            return Err(invalid("armijo slope fraction must lie in (0, 1)"));
        }
        if let Some(a0) = self.lm_alpha0 {
            if !(a0 > T::zero()) {
                return Err(invalid("lm_alpha0 must be positive"));
            }
        }
        if !(self.lm_decay > T::zero() && self.lm_decay < T::one()) {
            return Err(invalid("lm_decay must lie in (0, 1)"));
        }
        if !(self.lm_alpha_floor > T::zero()) {
            return Err(invalid("lm_alpha_floor must be positive"));
        }
        if !(self.inner_tol > T::zero()) {
            return Err(invalid("inner_tol must be positive"));
        }
        if !(self.grad_tol >= T::zero()) {
            return Err(invalid("grad_tol must be nonnegative"));
        }
        if self.stagnation_window == 0 {
            return Err(invalid("stagnation_window must be at least 1"));
        }
        Ok(())
    }

    /// Shift `α_n = max(q^n α₀, floor)` of the Levenberg–Marquardt schedule.
    pub fn lm_shift(&self, n: usize, delta: T) -> T {
        let base = self.lm_alpha0.unwrap_or(delta);
        let base = if base > T::zero() { base } else { T::one() };
        let exponent = i32::try_from(n).unwrap_or(i32::MAX);
        (base * self.lm_decay.powi(exponent)).max(self.lm_alpha_floor)
    }
}

/// Default smoothing `ε = 10⁻⁴·δ`, or `10⁻⁸·‖y^δ‖` for noise-free data.
pub fn default_epsilon<T: Real>(delta: T, data_norm: T) -> T {
    if delta > T::zero() {
        T::lit(1e-4) * delta
    } else {
        T::lit(1e-8) * data_norm
    }
}
