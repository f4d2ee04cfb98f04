//! Iterative minimization methods for the original and transformed functionals,
//! the discrepancy stopping rule and the shared iteration bookkeeping.
//!
//! Original-variable methods (ISTA, FISTA) measure the residual `‖Ax − y^δ‖`.
//! Transformed-variable methods (gradient descent, Levenberg–Marquardt,
//! Newton) measure `‖A N_ε(x̃) − y^δ‖` with the transform they iterate on, and
//! report relative errors of the back-transformed image.

mod config;
mod gradient;
mod lm;
mod newton;
mod proximal;
mod trace;

use std::fmt;
use std::str::FromStr;

pub use config::{default_epsilon, Armijo, Momentum, SolverConfig, StepSize};
pub use gradient::run_gradient_descent;
pub use lm::run_levenberg_marquardt;
pub use newton::run_newton;
pub use proximal::{fista_t_next, resolve_omega, run_fista, run_ista, run_transformed_ista};
pub use trace::{IterationTrace, StopReason, TraceRow};

use crate::error::{Error, Result};
use crate::functionals::ProblemData;
use crate::linalg::norm2;
use crate::transform::TransformSpec;
use crate::Real;

/// Result of a solver run.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    /// Final iterate in the method's native variable.
    pub x: Vec<T>,
    /// Final image in the original variable (back-transformed when needed).
    pub reconstruction: Vec<T>,
    pub trace: IterationTrace<T>,
    /// Transform the method iterated on; `None` for original-variable methods.
    pub transform: Option<TransformSpec<T>>,
}

/// `(S_θ(x))_k = sgn(x_k)·max(|x_k| − θ, 0)`
pub fn soft_threshold<T: Real>(x: &[T], theta: T) -> Vec<T> {
    x.iter().map(|&v| shrink(v, theta)).collect()
}

#[inline]
pub(crate) fn shrink<T: Real>(v: T, theta: T) -> T {
    let mag = v.abs() - theta;
    if mag > T::zero() {
        if v < T::zero() {
            -mag
        } else {
            mag
        }
    } else {
        T::zero()
    }
}

/// `‖F(x) − y^δ‖ ≤ τδ`, boundary inclusive.
pub fn check_discrepancy<T: Real>(residual_norm: T, tau: T, delta: T) -> bool {
    residual_norm <= tau * delta
}

/// Solver names understood by [`Method::from_str`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ista,
    Fista,
    GradientDescent,
    LevenbergMarquardt,
    Newton,
    TransformedIsta,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Ista,
        Method::Fista,
        Method::GradientDescent,
        Method::LevenbergMarquardt,
        Method::Newton,
        Method::TransformedIsta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ista => "ista",
            Method::Fista => "fista",
            Method::GradientDescent => "gd",
            Method::LevenbergMarquardt => "lm",
            Method::Newton => "newton",
            Method::TransformedIsta => "transformed-ista",
        }
    }

    /// Whether the method iterates on the transformed variable.
    pub fn is_transformed(&self) -> bool {
        !matches!(self, Method::Ista | Method::Fista)
    }

    pub fn run<T: Real>(
        &self,
        p: &ProblemData<T>,
        cfg: &SolverConfig<T>,
        delta: T,
    ) -> Result<Solution<T>> {
        match self {
            Method::Ista => run_ista(p, cfg, delta),
            Method::Fista => run_fista(p, cfg, delta),
            Method::GradientDescent => run_gradient_descent(p, cfg, delta),
            Method::LevenbergMarquardt => run_levenberg_marquardt(p, cfg, delta),
            Method::Newton => run_newton(p, cfg, delta),
            Method::TransformedIsta => run_transformed_ista(p, cfg, delta),
        }
    }

    pub fn available() -> String {
        Self::ALL.iter().map(Method::name).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let alias = match key.as_str() {
            "gradient-descent" | "gradient_descent" | "armijo" => "gd",
            "levenberg-marquardt" | "levenberg_marquardt" => "lm",
            "transformed_ista" => "transformed-ista",
            other => other,
        };
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == alias)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown solver '{s}'; available solvers: {}",
                    Method::available()
                ))
            })
    }
}

/// Initial transformed-variable iterate: explicit `x0`, a FISTA warm start
/// mapped through the inverse transform, or zero.
pub(crate) fn transformed_start<T: Real>(
    p: &ProblemData<T>,
    cfg: &SolverConfig<T>,
    spec: &TransformSpec<T>,
) -> Result<(Vec<T>, usize)> {
    let n = p.n_coefficients();
    if let Some(x0) = &cfg.x0 {
        crate::error::check_len("initial iterate", n, x0.len())?;
        return Ok((x0.clone(), 0));
    }
    if cfg.warm_start_iters == 0 {
        return Ok((vec![T::zero(); n], 0));
    }
    let warm_cfg = SolverConfig {
        max_iter: cfg.warm_start_iters,
        x0: None,
        warm_start_iters: 0,
        record_iterates: false,
        momentum: Momentum::Nesterov,
        ..cfg.clone()
    };
    // Discrepancy is disabled so that exactly the requested count runs.
    let warm = run_fista(p, &warm_cfg, T::zero())?;
    Ok((spec.apply_inverse(&warm.x), warm.trace.n_star))
}

pub(crate) fn smoothing_for<T: Real>(
    p: &ProblemData<T>,
    cfg: &SolverConfig<T>,
    delta: T,
    default_smoothed: bool,
) -> Result<TransformSpec<T>> {
    match cfg.epsilon {
        Some(eps) => TransformSpec::new(eps),
        None if default_smoothed => {
            TransformSpec::smoothed(default_epsilon(delta, norm2(p.data())))
        }
        None => Ok(TransformSpec::exact()),
    }
}
