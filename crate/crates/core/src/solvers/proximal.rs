use super::trace::Recorder;
use super::{check_discrepancy, shrink, Momentum, Solution, SolverConfig, StepSize, StopReason};
use crate::error::{check_len, Error, Result};
use crate::functionals::{eval_j, grad_j, ProblemData};
use crate::linalg::{dot, norm1, norm2};
use crate::transform::TransformSpec;
use crate::Real;

/// Resolves the configured step size against the operator norm.
pub fn resolve_omega<T: Real>(p: &ProblemData<T>, omega: StepSize<T>) -> Result<T> {
    match omega {
        StepSize::Fixed(w) => Ok(w),
        StepSize::Auto => {
            let norm = p.operator().spectral_norm_estimate(100);
            if norm.is_zero() {
                Ok(T::one())
            } else {
                Ok(T::lit(0.9) / (norm * norm))
            }
        }
    }
}

/// One step of the Nesterov sequence `t_k = (1 + √(1 + 4t²_{k−1}))/2`.
pub fn fista_t_next<T: Real>(t: T) -> T {
    (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) / T::two()
}

/// Iterative shrinkage-thresholding on `T(x) = ‖Ax − y^δ‖² + α‖x‖₁`:
///
/// `x_{k+1} = S_{αω/2}(x_k − ωAᵀ(Ax_k − y^δ))`.
///
/// The step `ω` multiplies the half gradient `Aᵀ(Ax − y^δ)` of the squared
/// misfit, so the threshold is `αω/2` and fixed points minimize `T` itself.
/// `T` decreases monotonically whenever `ω‖A‖² ≤ 1`.
pub fn run_ista<T: Real>(p: &ProblemData<T>, cfg: &SolverConfig<T>, delta: T) -> Result<Solution<T>> {
    proximal_gradient(p, cfg, delta, None)
}

/// Accelerated variant of [`run_ista`] with the momentum rule in `cfg.momentum`.
/// The first step always coincides with an ISTA step.
pub fn run_fista<T: Real>(p: &ProblemData<T>, cfg: &SolverConfig<T>, delta: T) -> Result<Solution<T>> {
    proximal_gradient(p, cfg, delta, Some(cfg.momentum))
}

fn proximal_gradient<T: Real>(
    p: &ProblemData<T>,
    cfg: &SolverConfig<T>,
    delta: T,
    momentum: Option<Momentum<T>>,
) -> Result<Solution<T>> {
    cfg.validate()?;
    let n = p.n_coefficients();
    let a = p.operator();
    let omega = resolve_omega(p, cfg.omega)?;
    let theta = p.alpha() * omega / T::two();

    let mut x = match &cfg.x0 {
        Some(x0) => {
            check_len("initial iterate", n, x0.len())?;
            x0.clone()
        }
        None => vec![T::zero(); n],
    };
    let mut ax = a.matvec(&x)?;
    let misfit = |ax: &[T]| -> Vec<T> { ax.iter().zip(p.data()).map(|(&u, &y)| u - y).collect() };
    let objective = |r: &[T], x: &[T]| dot(r, r) + p.alpha() * norm1(x);

    let mut rec = Recorder::new(cfg.record_iterates, cfg.stagnation_tol, cfg.stagnation_window);
    let mut r = misfit(&ax);
    rec.push(&x, norm2(&r), objective(&r, &x), p.relative_error(&x));

    let mut x_prev = x.clone();
    let mut ax_prev = ax.clone();
    let mut t = T::one();

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

        // Extrapolation point z_k and its image A z_k (by linearity).
        let coef = match momentum {
            None => T::zero(),
            Some(Momentum::Nesterov) if k == 0 => T::zero(),
            Some(Momentum::Nesterov) => {
                let t_next = fista_t_next(t);
                let c = (t - T::one()) / t_next;
                t = t_next;
                c
            }
            Some(Momentum::Beta(beta)) => {
                let kk = T::of_usize(k);
                if k == 0 {
                    T::zero()
                } else {
                    (kk - T::one()) / (kk + beta - T::one())
                }
            }
        };
        let (z, az): (Vec<T>, Vec<T>) = if coef.is_zero() {
            (x.clone(), ax.clone())
        } else {
            (
                x.iter().zip(&x_prev).map(|(&u, &v)| u + coef * (u - v)).collect(),
                ax.iter().zip(&ax_prev).map(|(&u, &v)| u + coef * (u - v)).collect(),
            )
        };
        let rz = misfit(&az);
        let grad = a.transpose_matvec(&rz)?;
        let x_next: Vec<T> = z
            .iter()
            .zip(&grad)
            .map(|(&zk, &gk)| shrink(zk - omega * gk, theta))
            .collect();
        if !crate::linalg::all_finite(&x_next) {
            return Err(Error::Divergence { iteration: k + 1 });
        }

        x_prev = std::mem::replace(&mut x, x_next);
        ax_prev = std::mem::replace(&mut ax, a.matvec(&x)?);
        r = misfit(&ax);
        rec.push(&x, norm2(&r), objective(&r, &x), p.relative_error(&x));
    };

    Ok(Solution {
        reconstruction: x.clone(),
        x,
        trace: rec.finish(stop),
        transform: None,
    })
}

/// Shrinkage iteration on the transformed variable with the exact transform,
///
/// `x̃_{k+1} = S_{αω}(x̃_k − 2ω G(x̃_k) Aᵀ(A N(x̃_k) − y^δ))`.
///
/// Provided for experimentation; no convergence guarantee is claimed for it.
pub fn run_transformed_ista<T: Real>(
    p: &ProblemData<T>,
    cfg: &SolverConfig<T>,
    delta: T,
) -> Result<Solution<T>> {
    cfg.validate()?;
    let spec = super::smoothing_for(p, cfg, delta, false)?;
    let omega = resolve_omega(p, cfg.omega)?;
    let theta = p.alpha() * omega;
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
        // grad_j carries 2αx̃ as well; the data part is 2 G Aᵀ r.
        let g = grad_j(p, &x, &spec)?;
        let two_alpha = T::two() * p.alpha();
        x = x
            .iter()
            .zip(&g)
            .map(|(&xk, &gk)| shrink(xk - omega * (gk - two_alpha * xk), theta))
            .collect();
        if !crate::linalg::all_finite(&x) {
            return Err(Error::Divergence { iteration: k + 1 });
        }
        push_transformed(&mut rec, p, &spec, &x)?;
    };

    Ok(Solution {
        reconstruction: spec.apply(&x),
        x,
        trace: rec.finish(stop),
        transform: Some(spec),
    })
}

/// Records residual, `J` value and back-transformed error of a transformed iterate.
pub(crate) fn push_transformed<T: Real>(
    rec: &mut Recorder<T>,
    p: &ProblemData<T>,
    spec: &TransformSpec<T>,
    x: &[T],
) -> Result<()> {
    let r = p.transformed_residual(x, spec)?;
    let value = dot(&r, &r) + p.alpha() * dot(x, x);
    debug_assert!((value - eval_j(p, x, spec)?).abs() <= T::lit(1e-8) * (T::one() + value.abs()));
    let err = p.relative_error(&spec.apply(x));
    rec.push(x, norm2(&r), value, err);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;

    #[test]
    fn t_sequence() {
        let t1 = fista_t_next(1.0f64);
        assert!((t1 - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let t2 = fista_t_next(t1);
        // (1 + √(1 + 4·t₁²))/2 with t₁² = (3 + √5)/2
        assert!((t2 - (1.0 + (7.0 + 2.0 * 5f64.sqrt()).sqrt()) / 2.0).abs() < 1e-15);
        assert!((t2 - 2.19353).abs() < 1e-5);
    }

    #[test]
    fn zero_data_stops_immediately() {
        let p = ProblemData::new(SparseMatrix::<f64>::identity(3), vec![0.0; 3], 1.0).unwrap();
        let sol = run_ista(&p, &SolverConfig::default(), 0.0).unwrap();
        assert_eq!(sol.trace.n_star, 0);
        assert_eq!(sol.trace.stop_reason, StopReason::Discrepancy);
        assert_eq!(sol.x, vec![0.0; 3]);
    }

    #[test]
    fn identity_fixed_point_is_shrinkage() {
        // min ‖x − y‖² + α‖x‖₁ is solved by shrinking y by α/2; with ω = 1 the
        // first ISTA step lands there exactly.
        let p = ProblemData::new(SparseMatrix::<f64>::identity(2), vec![2.0, 0.1], 2.0).unwrap();
        let cfg = SolverConfig {
            omega: StepSize::Fixed(1.0),
            max_iter: 50,
            ..SolverConfig::default()
        };
        let sol = run_ista(&p, &cfg, 0.0).unwrap();
        assert_eq!(sol.trace.rows[1].functional, sol.trace.final_row().functional);
        assert!((sol.x[0] - 1.0).abs() < 1e-15 && sol.x[1] == 0.0);
        assert_eq!(sol.trace.stop_reason, StopReason::Stagnation);
    }

    #[test]
    fn beta_first_step_matches_ista() {
        let a = SparseMatrix::from_dense(2, 2, &[1.0, 0.3, 0.2, 0.8]).unwrap();
        let p = ProblemData::new(a, vec![1.0, -0.5], 0.1).unwrap();
        let one = SolverConfig {
            max_iter: 1,
            ..SolverConfig::default()
        };
        let ista = run_ista(&p, &one, 0.0).unwrap();
        for momentum in [Momentum::Beta(3.0), Momentum::Beta(5.0), Momentum::Nesterov] {
            let cfg = SolverConfig { momentum, ..one.clone() };
            assert_eq!(run_fista(&p, &cfg, 0.0).unwrap().x, ista.x);
        }
    }

    #[test]
    fn huge_step_diverges_with_error() {
        let a = SparseMatrix::from_dense(2, 2, &[10.0, 0.0, 0.0, 10.0]).unwrap();
        let p = ProblemData::new(a, vec![1.0, 1.0], 1e-3).unwrap();
        let cfg = SolverConfig {
            omega: StepSize::Fixed(1e3),
            max_iter: 10_000,
            ..SolverConfig::default()
        };
        let err = run_ista(&p, &cfg, 0.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        assert!(err.to_string().contains("reduce omega"));
    }
}
