//! The original functional `T(x) = ‖Ax − y^δ‖² + α‖x‖₁` and the transformed
//! functionals `J(x̃) = ‖A N(x̃) − y^δ‖² + α‖x̃‖²` (exact) and `J^ε` (smoothed),
//! with the gradient and Hessian-vector products of the latter.
//!
//! Both derivative representations carry the leading factor 2 of the
//! squared norms.

use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm1, norm2, DiagonalOperator, SparseMatrix};
use crate::transform::TransformSpec;
use crate::Real;

/// Forward operator, noisy data and regularization weight.
#[derive(Debug, Clone)]
pub struct ProblemData<T> {
    a: Arc<SparseMatrix<T>>,
    y_delta: Vec<T>,
    alpha: T,
    truth: Option<Vec<T>>,
}

impl<T: Real> ProblemData<T> {
    pub fn new(a: impl Into<Arc<SparseMatrix<T>>>, y_delta: Vec<T>, alpha: T) -> Result<Self> {
        let a = a.into();
        check_len("data vector", a.n_rows(), y_delta.len())?;
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self {
            a,
            y_delta,
            alpha,
            truth: None,
        })
    }

    /// Attaches a ground truth in the original variable; solvers then record
    /// relative reconstruction errors.
    pub fn with_ground_truth(mut self, truth: Vec<T>) -> Result<Self> {
        check_len("ground truth", self.a.n_cols(), truth.len())?;
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn with_alpha(&self, alpha: T) -> Result<Self> {
        let mut out = Self::new(self.a.clone(), self.y_delta.clone(), alpha)?;
        out.truth = self.truth.clone();
        Ok(out)
    }

    pub fn operator(&self) -> &SparseMatrix<T> {
        &self.a
    }

    pub fn shared_operator(&self) -> Arc<SparseMatrix<T>> {
        self.a.clone()
    }

    pub fn data(&self) -> &[T] {
        &self.y_delta
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn ground_truth(&self) -> Option<&[T]> {
        self.truth.as_deref()
    }

    pub fn n_coefficients(&self) -> usize {
        self.a.n_cols()
    }

    /// `‖x − x†‖/‖x†‖` when a ground truth is attached.
    pub fn relative_error(&self, x: &[T]) -> Option<T> {
        let truth = self.truth.as_deref()?;
        let denom = norm2(truth);
        let num = crate::linalg::dist2(x, truth);
        Some(if denom.is_zero() { num } else { num / denom })
    }

    /// `Ax − y^δ`
    pub fn residual(&self, x: &[T]) -> Result<Vec<T>> {
        let mut r = self.a.matvec(x)?;
        for (ri, &yi) in r.iter_mut().zip(&self.y_delta) {
            *ri -= yi;
        }
        Ok(r)
    }

    /// `A N_ε(x̃) − y^δ`
    pub fn transformed_residual(&self, x: &[T], spec: &TransformSpec<T>) -> Result<Vec<T>> {
        check_len("transformed iterate", self.a.n_cols(), x.len())?;
        self.residual(&spec.apply(x))
    }
}

/// `‖Ax − y^δ‖₂² + α‖x‖₁`
pub fn eval_t<T: Real>(p: &ProblemData<T>, x: &[T]) -> Result<T> {
    let r = p.residual(x)?;
    Ok(dot(&r, &r) + p.alpha * norm1(x))
}

/// `‖A N_ε(x) − y^δ‖₂² + α‖x‖₂²`, with `N` in place of `N_ε` for the exact spec.
pub fn eval_j<T: Real>(p: &ProblemData<T>, x: &[T], spec: &TransformSpec<T>) -> Result<T> {
    let r = p.transformed_residual(x, spec)?;
    Ok(dot(&r, &r) + p.alpha * dot(x, x))
}

/// `2 G_ε(x) Aᵀ(A N_ε(x) − y^δ) + 2αx`
pub fn grad_j<T: Real>(p: &ProblemData<T>, x: &[T], spec: &TransformSpec<T>) -> Result<Vec<T>> {
    let r = p.transformed_residual(x, spec)?;
    grad_from_residual(p, x, spec, &r)
}

pub(crate) fn grad_from_residual<T: Real>(
    p: &ProblemData<T>,
    x: &[T],
    spec: &TransformSpec<T>,
    r: &[T],
) -> Result<Vec<T>> {
    let atr = p.a.transpose_matvec(r)?;
    let two = T::two();
    Ok(x
        .iter()
        .zip(&atr)
        .map(|(&xk, &gk)| two * spec.first_derivative(xk) * gk + two * p.alpha * xk)
        .collect())
}

/// The Hessian `∇²J^ε(x)` at a fixed point, applied matrix-free:
/// `2 H_ε(x, Aᵀr) + 2 G_ε A ᵀA G_ε + 2αI` with `r = A N_ε(x) − y^δ`.
#[derive(Debug, Clone)]
pub struct HessianOperator<'a, T> {
    a: &'a SparseMatrix<T>,
    g: DiagonalOperator<T>,
    h: DiagonalOperator<T>,
    alpha: T,
}

impl<'a, T: Real> HessianOperator<'a, T> {
    pub fn new(p: &'a ProblemData<T>, x: &[T], spec: &TransformSpec<T>) -> Result<Self> {
        if spec.is_exact() {
            return Err(Error::NotTwiceDifferentiable);
        }
        let r = p.transformed_residual(x, spec)?;
        Self::from_residual(p, x, spec, &r)
    }

    pub(crate) fn from_residual(
        p: &'a ProblemData<T>,
        x: &[T],
        spec: &TransformSpec<T>,
        r: &[T],
    ) -> Result<Self> {
        let atr = p.a.transpose_matvec(r)?;
        Ok(Self {
            a: &p.a,
            g: spec.gradient_diag(x),
            h: spec.hessian_diag(x, &atr)?,
            alpha: p.alpha,
        })
    }

    /// Diagonal of `G_ε(x)`.
    pub fn transform_gradient(&self) -> &DiagonalOperator<T> {
        &self.g
    }

    /// Diagonal of `H_ε(x, Aᵀr)`.
    pub fn curvature_diag(&self) -> &DiagonalOperator<T> {
        &self.h
    }

    pub fn apply(&self, w: &[T]) -> Result<Vec<T>> {
        let gw = self.g.apply(w)?;
        let mut out = self.a.normal_matvec(&gw)?;
        self.g.apply_in_place(&mut out)?;
        let two = T::two();
        for (k, o) in out.iter_mut().enumerate() {
            *o = two * *o + two * self.h.diagonal()[k] * w[k] + two * self.alpha * w[k];
        }
        Ok(out)
    }
}

/// `∇²J^ε(x)·w`
pub fn hess_j_eps_matvec<T: Real>(
    p: &ProblemData<T>,
    x: &[T],
    spec: &TransformSpec<T>,
    w: &[T],
) -> Result<Vec<T>> {
    check_len("hessian direction", p.n_coefficients(), w.len())?;
    HessianOperator::new(p, x, spec)?.apply(w)
}

/// Maps a transformed-variable iterate to the reconstruction in the original
/// variable: `N(x̃)` for the exact spec, `N_ε(x̃)` otherwise.
pub fn back_transform<T: Real>(x_tilde: &[T], spec: &TransformSpec<T>) -> Vec<T> {
    spec.apply(x_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ident(n: usize, y: Vec<f64>, alpha: f64) -> ProblemData<f64> {
        ProblemData::new(SparseMatrix::identity(n), y, alpha).unwrap()
    }

    #[test]
    fn t_identity_example() {
        let p = ident(2, vec![0.0, 0.0], 1.0);
        assert_eq!(eval_t(&p, &[1.0, -1.0]).unwrap(), 4.0);
        let p = ident(2, vec![3.0, 4.0], 1.0);
        assert_eq!(eval_t(&p, &[0.0, 0.0]).unwrap(), 25.0);
    }

    #[test]
    fn j_at_zero_is_data_norm() {
        let p = ident(2, vec![3.0, 4.0], 0.5);
        for eps in [0.0, 0.1] {
            let spec = TransformSpec::new(eps).unwrap();
            assert_eq!(eval_j(&p, &[0.0, 0.0], &spec).unwrap(), 25.0);
        }
    }

    #[test]
    fn exact_gradient_vanishes_at_zero() {
        let p = ident(2, vec![3.0, -4.0], 0.5);
        let g = grad_j(&p, &[0.0, 0.0], &TransformSpec::exact()).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn smoothed_gradient_at_zero() {
        let p = ident(2, vec![3.0, -4.0], 0.5);
        let eps = 0.01;
        let g = grad_j(&p, &[0.0, 0.0], &TransformSpec::smoothed(eps).unwrap()).unwrap();
        assert!((g[0] - 2.0 * eps * -3.0).abs() < 1e-15);
        assert!((g[1] - 2.0 * eps * 4.0).abs() < 1e-15);
    }

    #[test]
    fn hessian_edge_cases() {
        let p = ident(2, vec![1.0, 2.0], 0.3);
        let spec = TransformSpec::smoothed(0.1).unwrap();
        let hv = hess_j_eps_matvec(&p, &[0.4, -0.02], &spec, &[0.0, 0.0]).unwrap();
        assert_eq!(hv, vec![0.0, 0.0]);

        let zero_op = ProblemData::new(SparseMatrix::zeros(2, 2), vec![1.0, 2.0], 0.3).unwrap();
        let w = [1.5, -2.0];
        let hv = hess_j_eps_matvec(&zero_op, &[0.4, -0.02], &spec, &w).unwrap();
        assert!((hv[0] - 0.6 * 1.5).abs() < 1e-15 && (hv[1] + 0.6 * 2.0).abs() < 1e-15);

        assert_eq!(
            hess_j_eps_matvec(&p, &[0.4, 0.1], &TransformSpec::exact(), &w),
            Err(Error::NotTwiceDifferentiable)
        );
    }

    #[test]
    fn back_transform_examples() {
        assert_eq!(back_transform(&[0.0, 0.0], &TransformSpec::exact()), vec![0.0, 0.0]);
        assert_eq!(back_transform(&[2.0, -1.0], &TransformSpec::exact()), vec![4.0, -1.0]);
    }

    #[test]
    fn validates_inputs() {
        assert!(ProblemData::new(SparseMatrix::<f64>::identity(2), vec![1.0], 1.0).is_err());
        assert!(ProblemData::new(SparseMatrix::<f64>::identity(1), vec![1.0], 0.0).is_err());
        let p = ident(2, vec![1.0, 1.0], 1.0);
        assert!(eval_t(&p, &[1.0]).is_err());
        assert!(eval_j(&p, &[1.0, 2.0, 3.0], &TransformSpec::exact()).is_err());
        assert!(p.clone().with_ground_truth(vec![1.0]).is_err());
    }

    #[test]
    fn relative_error_uses_truth() {
        let p = ident(2, vec![1.0, 1.0], 1.0).with_ground_truth(vec![3.0, 4.0]).unwrap();
        assert!((p.relative_error(&[3.0, 4.0]).unwrap()).abs() < 1e-15);
        assert!((p.relative_error(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }
}
