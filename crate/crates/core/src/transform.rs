//! The superposition operators `N(x)_k = sgn(x_k)·x_k²` and its C² smoothing
//! `N_ε`, together with their diagonal derivative representations.
//!
//! The smoothed profile is
//!
//! ```text
//!            ⎧ −τ² − ε²/3        τ < −ε
//! η_ε(τ) =   ⎨ τ³/(3ε) + ετ      |τ| ≤ ε
//!            ⎩  τ² + ε²/3        τ > ε
//! ```
//!
//! Knots `|τ| = ε` are evaluated on the middle branch. Every routine is written
//! in terms of `|τ|` and the sign of `τ`, so odd profiles are exactly odd and
//! even profiles are exactly even.

use crate::error::{check_len, Error, Result};
use crate::linalg::DiagonalOperator;
use crate::Real;

/// Smoothing parameter of the transform. `epsilon == 0` selects the exact
/// (once differentiable) transform `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSpec<T> {
    epsilon: T,
}

impl<T: Real> TransformSpec<T> {
    /// Accepts any finite `epsilon ≥ 0`.
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon >= T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    /// The exact transform `N`.
    pub fn exact() -> Self {
        Self { epsilon: T::zero() }
    }

    /// A smoothed transform; `epsilon` must be strictly positive.
    pub fn smoothed(epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "smoothing epsilon must be finite and positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn is_exact(&self) -> bool {
        self.epsilon.is_zero()
    }

    /// `η_ε(τ)`; reduces to `η(τ)` when exact.
    #[inline]
    pub fn value(&self, tau: T) -> T {
        let eps = self.epsilon;
        let a = tau.abs();
        let mag = if a <= eps && !eps.is_zero() {
            a * (a * a / (T::lit(3.0) * eps) + eps)
        } else {
            a * a + eps * eps / T::lit(3.0)
        };
        copy_sign(mag, tau)
    }

    /// `η_ε′(τ)`; reduces to `2|τ|` when exact.
    #[inline]
    pub fn first_derivative(&self, tau: T) -> T {
        let eps = self.epsilon;
        let a = tau.abs();
        if a <= eps && !eps.is_zero() {
            a * a / eps + eps
        } else {
            T::two() * a
        }
    }

    /// `η_ε″(τ)`. Fails for the exact transform, which has no second derivative at 0.
    pub fn second_derivative(&self, tau: T) -> Result<T> {
        if self.is_exact() {
            return Err(Error::NotTwiceDifferentiable);
        }
        Ok(self.second_derivative_unchecked(tau))
    }

    #[inline]
    fn second_derivative_unchecked(&self, tau: T) -> T {
        let eps = self.epsilon;
        if tau.abs() <= eps {
            T::two() * tau / eps
        } else {
            copy_sign(T::two(), tau)
        }
    }

    /// Inverse of `η_ε`, which is strictly increasing for every `ε ≥ 0`.
    pub fn inverse(&self, v: T) -> T {
        let eps = self.epsilon;
        let a = v.abs();
        let knot_value = T::lit(4.0) / T::lit(3.0) * eps * eps;
        let mag = if eps.is_zero() {
            a.sqrt()
        } else if a <= knot_value {
            // Unique real root of t³ + 3ε²t − 3εa = 0 (Cardano).
            let half_q = T::lit(1.5) * eps * a;
            let p_third = eps * eps;
            let disc = (half_q * half_q + p_third * p_third * p_third).sqrt();
            let root = (half_q + disc).cbrt() + (half_q - disc).cbrt();
            root.max(T::zero()).min(eps)
        } else {
            (a - eps * eps / T::lit(3.0)).sqrt()
        };
        copy_sign(mag, v)
    }

    /// Componentwise `η_ε`: the operator `N_ε` (or `N` when exact).
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        x.iter().map(|&v| self.value(v)).collect()
    }

    /// Componentwise inverse of [`apply`](Self::apply).
    pub fn apply_inverse(&self, x: &[T]) -> Vec<T> {
        x.iter().map(|&v| self.inverse(v)).collect()
    }

    /// `G_ε(x) = diag(η_ε′(x_k))`; for the exact transform `G(x) = diag(2|x_k|)`.
    pub fn gradient_diag(&self, x: &[T]) -> DiagonalOperator<T> {
        DiagonalOperator::new(x.iter().map(|&v| self.first_derivative(v)).collect())
    }

    /// `H_ε(x, w) = diag(η_ε″(x_k)·w_k)`.
    pub fn hessian_diag(&self, x: &[T], w: &[T]) -> Result<DiagonalOperator<T>> {
        if self.is_exact() {
            return Err(Error::NotTwiceDifferentiable);
        }
        check_len("hessian_diag weights", x.len(), w.len())?;
        Ok(DiagonalOperator::new(
            x.iter()
                .zip(w)
                .map(|(&v, &wk)| self.second_derivative_unchecked(v) * wk)
                .collect(),
        ))
    }
}

#[inline]
fn copy_sign<T: Real>(mag: T, sign_of: T) -> T {
    if sign_of < T::zero() {
        -mag
    } else {
        mag
    }
}

/// `η(τ) = sgn(τ)·τ²`.
#[inline]
pub fn eta<T: Real>(tau: T) -> T {
    tau * tau.abs()
}

/// `N(x)`, the exact transform applied componentwise.
pub fn apply_n<T: Real>(x: &[T]) -> Vec<T> {
    x.iter().map(|&v| eta(v)).collect()
}

/// `N_ε(x)`, or `N(x)` for the exact spec.
pub fn apply_n_eps<T: Real>(spec: &TransformSpec<T>, x: &[T]) -> Vec<T> {
    spec.apply(x)
}
