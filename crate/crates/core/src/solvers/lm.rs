use super::gradient::finish;
use super::proximal::push_transformed;
use super::trace::Recorder;
use super::{check_discrepancy, Solution, SolverConfig, StopReason};
use crate::error::{Error, Result};
use crate::functionals::ProblemData;
use crate::linalg::{cg_solve, CgOptions};
use crate::Real;

/// Levenberg–Marquardt iteration for `F(x̃) = A N_ε(x̃) = y^δ`:
///
/// `x̃_{n+1} = x̃_n + (G AᵀA G + α_n I)⁻¹ G Aᵀ(y^δ − F(x̃_n))`, `G = G_ε(x̃_n)`,
///
/// with `α_n = q^n α₀` and each system solved by conjugate gradients. A solve
/// that does not converge is retried once with the shift doubled; a second
/// failure ends the run with [`StopReason::Stagnation`].
///
/// With the exact transform the zero vector is a fixed point (`G(0) = 0`), so a
/// nonzero `x0` or a warm start is needed.
pub fn run_levenberg_marquardt<T: Real>(
    p: &ProblemData<T>,
    cfg: &SolverConfig<T>,
    delta: T,
) -> Result<Solution<T>> {
    cfg.validate()?;
    let spec = super::smoothing_for(p, cfg, delta, false)?;
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
        if k >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        if rec.stagnated() {
            break StopReason::Stagnation;
        }

        let r = p.transformed_residual(&x, &spec)?;
        let g = spec.gradient_diag(&x);
        let mut rhs = a.transpose_matvec(&r)?;
        for (v, &gk) in rhs.iter_mut().zip(g.diagonal()) {
            *v = -gk * *v;
        }
        let solve = |shift: T| {
            cg_solve(
                |w: &[T]| {
                    let gw = g.apply(w).expect("diagonal sized to the iterate");
                    let mut out = a.normal_matvec(&gw).expect("operator sized to the iterate");
                    for ((o, &gk), &wk) in out.iter_mut().zip(g.diagonal()).zip(w) {
                        *o = gk * *o + shift * wk;
                    }
                    out
                },
                &rhs,
                &opts,
            )
        };
        let shift = cfg.lm_shift(k, delta);
        let step = match solve(shift) {
            Ok(out) if out.converged => Some(out.x),
            _ => match solve(T::two() * shift) {
                Ok(out) if out.converged => Some(out.x),
                _ => None,
            },
        };
        let Some(step) = step else {
            break StopReason::Stagnation;
        };
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += *si;
        }
        if !crate::linalg::all_finite(&x) {
            return Err(Error::Divergence { iteration: k + 1 });
        }
        push_transformed(&mut rec, p, &spec, &x)?;
    };

    Ok(finish(spec, x, rec, stop))
}
