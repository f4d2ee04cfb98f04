use super::{axpy, dot, norm2};
use crate::error::{check_len, Error, Result};
use crate::Real;

/// Stopping controls for [`cg_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions<T> {
    /// Relative residual target `‖Ax − b‖ ≤ tol·‖b‖`.
    pub tol: T,
    pub max_iter: usize,
    /// The residual is recomputed from scratch every this many iterations.
    pub recompute_every: usize,
}

impl<T: Real> CgOptions<T> {
    /// Relative tolerance `1e-10` and `2n` iterations.
    pub fn for_dimension(n: usize) -> Self {
        Self {
            tol: T::lit(1e-10),
            max_iter: 2 * n,
            recompute_every: 50,
        }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome<T> {
    /// Best iterate found (smallest residual norm).
    pub x: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm of the best iterate after each iteration, starting with
    /// `‖b‖` for the zero initial guess. Nonincreasing by construction.
    pub residual_norms: Vec<T>,
}

impl<T: Real> CgOutcome<T> {
    pub fn final_residual(&self) -> T {
        *self.residual_norms.last().expect("history is never empty")
    }
}

/// Solves `apply(x) = b` for a symmetric positive definite `apply` by the
/// Hestenes–Stiefel conjugate gradient recurrence, starting from zero.
///
/// Returns an error naming the iteration at which `pᵀ·apply(p) ≤ 0` is
/// observed. Exhausting `max_iter` is not an error: the best iterate is
/// returned with `converged == false`.
pub fn cg_solve<T, F>(mut apply: F, b: &[T], opts: &CgOptions<T>) -> Result<CgOutcome<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Vec<T>,
{
    let n = b.len();
    let b_norm = norm2(b);
    let target = opts.tol * b_norm;
    let mut x = vec![T::zero(); n];
    let mut best_x = x.clone();
    let mut best = b_norm;
    let mut residual_norms = vec![b_norm];
    if b_norm.is_zero() {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            converged: true,
            residual_norms,
        });
    }

    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let recompute = opts.recompute_every.max(1);

    for k in 1..=opts.max_iter {
        let ap = apply(&p);
        check_len("cg operator output", n, ap.len())?;
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::NonPositiveCurvature { iteration: k });
        }
        let step = rr / pap;
        axpy(step, &p, &mut x);
        if k % recompute == 0 {
            let ax = apply(&x);
            for ((ri, &bi), &axi) in r.iter_mut().zip(b).zip(&ax) {
                *ri = bi - axi;
            }
        } else {
            axpy(-step, &ap, &mut r);
        }
        let rr_new = dot(&r, &r);
        let r_norm = rr_new.sqrt();
        if r_norm < best {
            best = r_norm;
            best_x.copy_from_slice(&x);
        }
        residual_norms.push(best);
        if best <= target || rr_new.is_zero() {
            return Ok(CgOutcome {
                x: best_x,
                iterations: k,
                converged: true,
                residual_norms,
            });
        }
        let beta = rr_new / rr;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }

    Ok(CgOutcome {
        x: best_x,
        iterations: opts.max_iter,
        converged: false,
        residual_norms,
    })
}
