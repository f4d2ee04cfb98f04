use super::proximal::push_transformed;
use super::trace::Recorder;
use super::{check_discrepancy, Armijo, Solution, SolverConfig, StopReason};
use crate::error::{Error, Result};
use crate::functionals::{eval_j, grad_j, ProblemData};
use crate::linalg::dot;
use crate::transform::TransformSpec;
use crate::Real;

pub(crate) struct Accepted<T> {
    pub x: Vec<T>,
}

/// Backtracking along `direction`: returns the first trial point
/// `x + t·direction`, `t = initial·shrink^m`, with
/// `f(x + t·d) ≤ f(x) + slope·t·⟨∇f, d⟩` and a strict decrease.
pub(crate) fn armijo_search<T, F>(
    mut f: F,
    x: &[T],
    f0: T,
    directional: T,
    direction: &[T],
    initial: T,
    params: &Armijo<T>,
) -> Result<Option<Accepted<T>>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T>,
{
    if !(directional < T::zero()) {
        return Ok(None);
    }
    let mut t = initial;
    for _ in 0..=params.max_backtracks {
        let trial: Vec<T> = x.iter().zip(direction).map(|(&u, &d)| u + t * d).collect();
        let value = f(&trial)?;
        if value.is_finite() && value <= f0 + params.slope * t * directional && value < f0 {
            return Ok(Some(Accepted { x: trial }));
        }
        t *= params.shrink;
    }
    Ok(None)
}

/// Steepest descent `x̃_{n+1} = x̃_n − ω_n ∇J(x̃_n)` on the transformed
/// functional (`J` for the exact transform, `J^ε` otherwise) with Armijo step
/// sizes. Stops on `‖F(x̃_n) − y^δ‖ ≤ τδ`, on `max_iter`, or with
/// [`StopReason::Stagnation`] when the gradient vanishes or the line search fails.
pub fn run_gradient_descent<T: Real>(
    p: &ProblemData<T>,
    cfg: &SolverConfig<T>,
    delta: T,
) -> Result<Solution<T>> {
    cfg.validate()?;
    let spec = super::smoothing_for(p, cfg, delta, false)?;
    let (mut x, warm) = super::transformed_start(p, cfg, &spec)?;

    let mut rec = Recorder::new(cfg.record_iterates, cfg.stagnation_tol, cfg.stagnation_window);
    rec.set_warm_start(warm);
    push_transformed(&mut rec, p, &spec, &x)?;

    let stop = loop {
        let k = rec.iterations();
        if check_discrepancy(rec.last_residual(), cfg.tau, delta) {
            break StopReason::Discrepancy;
        }
        if k >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        if rec.stagnated() {
            break StopReason::Stagnation;
        }
        let g = grad_j(p, &x, &spec)?;
        let gg = dot(&g, &g);
        if gg.is_zero() {
            break StopReason::Stagnation;
        }
        let descent: Vec<T> = g.iter().map(|&v| -v).collect();
        let accepted = armijo_search(
            |trial| eval_j(p, trial, &spec),
            &x,
            rec.last_functional(),
            -gg,
            &descent,
            cfg.armijo.initial_step,
            &cfg.armijo,
        )?;
        let Some(step) = accepted else {
            break StopReason::Stagnation;
        };
        if !crate::linalg::all_finite(&step.x) {
            return Err(Error::Divergence { iteration: k + 1 });
        }
        x = step.x;
        push_transformed(&mut rec, p, &spec, &x)?;
    };

    Ok(finish(spec, x, rec, stop))
}

pub(crate) fn finish<T: Real>(
    spec: TransformSpec<T>,
    x: Vec<T>,
    rec: Recorder<T>,
    stop: StopReason,
) -> Solution<T> {
    Solution {
        reconstruction: spec.apply(&x),
        x,
        trace: rec.finish(stop),
        transform: Some(spec),
    }
}
