use super::gradient::{armijo_search, finish};
use super::proximal::push_transformed;
use super::trace::Recorder;
use super::{check_discrepancy, Solution, SolverConfig, StopReason};
use crate::error::{Error, Result};
use crate::functionals::{eval_j, HessianOperator, ProblemData};
use crate::linalg::{cg_solve, dot, norm2, CgOptions};
use crate::Real;

/// Damped Newton iteration on the smoothed functional `J^ε`.
///
/// Each step solves `∇²J^ε(x̃_n) s = −∇J^ε(x̃_n)` by conjugate gradients on the
/// matrix-free Hessian and takes `x̃_{n+1} = x̃_n + λs` with `λ` from Armijo
/// backtracking, trying `λ = 1` first. When CG meets non-positive curvature or
/// the Newton direction is not a descent direction, the step falls back to the
/// shifted Gauss–Newton system `(2 G AᵀA G + 2αI + α_n I) s = −∇J^ε`.
///
/// Stops on `‖A N_ε(x̃_n) − y^δ‖ ≤ τδ`, on `‖∇J^ε‖ ≤ grad_tol`, on `max_iter`,
/// or with [`StopReason::Stagnation`] when neither direction yields descent.
pub fn run_newton<T: Real>(p: &ProblemData<T>, cfg: &SolverConfig<T>, delta: T) -> Result<Solution<T>> {
    cfg.validate()?;
    let spec = super::smoothing_for(p, cfg, delta, true)?;
    if spec.is_exact() {
        return Err(Error::InvalidParameter(
            "newton requires a smoothed transform (epsilon > 0)".into(),
        ));
    }
    let a = p.operator();
    let n = p.n_coefficients();
    let (mut x, warm) = super::transformed_start(p, cfg, &spec)?;
    let opts = CgOptions {
        tol: cfg.inner_tol,
        max_iter: cfg.inner_max_iter.unwrap_or(2 * n),
        recompute_every: 50,
    };

    let mut rec = Recorder::new(cfg.record_iterates, cfg.stagnation_tol, cfg.stagnation_window);
    rec.set_warm_start(warm);
    push_transformed(&mut rec, p, &spec, &x)?;

    let stop = loop {
        let k = rec.iterations();
        if check_discrepancy(rec.last_residual(), cfg.tau, delta) {
            break StopReason::Discrepancy;
        }
        let r = p.transformed_residual(&x, &spec)?;
        let g = crate::functionals::grad_from_residual(p, &x, &spec, &r)?;
        if norm2(&g) <= cfg.grad_tol {
            break StopReason::GradientTolerance;
        }
        if k >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        if rec.stagnated() {
            break StopReason::Stagnation;
        }

        let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();
        let f0 = rec.last_functional();
        let objective = |trial: &[T]| eval_j(p, trial, &spec);

        let hess = HessianOperator::from_residual(p, &x, &spec, &r)?;
        let newton_dir = match cg_solve(
            |w: &[T]| hess.apply(w).expect("hessian sized to the iterate"),
            &neg_g,
            &opts,
        ) {
            Ok(out) => Some(out.x),
            Err(Error::NonPositiveCurvature { .. }) => None,
            Err(e) => return Err(e),
        };
        let mut accepted = None;
        if let Some(dir) = newton_dir {
            accepted = armijo_search(objective, &x, f0, dot(&g, &dir), &dir, T::one(), &cfg.armijo)?;
        }
        if accepted.is_none() {
            let shift = cfg.lm_shift(k, delta);
            let gdiag = hess.transform_gradient();
            let two = T::two();
            let fallback = cg_solve(
                |w: &[T]| {
                    let gw = gdiag.apply(w).expect("diagonal sized to the iterate");
                    let mut out = a.normal_matvec(&gw).expect("operator sized to the iterate");
                    for ((o, &gk), &wk) in out.iter_mut().zip(gdiag.diagonal()).zip(w) {
                        *o = two * gk * *o + (two * p.alpha() + shift) * wk;
                    }
                    out
                },
                &neg_g,
                &opts,
            );
            if let Ok(out) = fallback {
                accepted =
                    armijo_search(objective, &x, f0, dot(&g, &out.x), &out.x, T::one(), &cfg.armijo)?;
            }
        }
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
