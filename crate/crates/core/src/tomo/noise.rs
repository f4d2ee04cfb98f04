use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::norm2;
use crate::Real;

/// Relative additive noise `y^δ = y + δ̄‖y‖₂ r` with `r` a unit vector drawn
/// from an isotropic Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub rel_level: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(rel_level: f64, seed: u64) -> Self {
        Self { rel_level, seed }
    }

    /// Unit-norm direction for a data vector of length `n`.
    pub fn direction(&self, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        loop {
            let r: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let nr = norm2(&r);
            if nr > 0.0 || n == 0 {
                return r.into_iter().map(|v| v / nr).collect();
            }
        }
    }
}

/// Returns `(y^δ, δ)` with `δ = δ̄‖y‖₂ = ‖y − y^δ‖₂`.
pub fn add_noise<T: Real>(y: &[T], model: &NoiseModel) -> (Vec<T>, T) {
    if model.rel_level == 0.0 {
        return (y.to_vec(), T::zero());
    }
    let y_norm = norm2(y).to_f64_lossy();
    let delta = model.rel_level * y_norm;
    let r = model.direction(y.len());
    let noisy = y
        .iter()
        .zip(&r)
        .map(|(&v, &rk)| v + T::lit(delta * rk))
        .collect();
    (noisy, T::lit(delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_level_is_identity() {
        let y = vec![1.0, -2.0, 3.0];
        let (yd, delta) = add_noise(&y, &NoiseModel::new(0.0, 7));
        assert_eq!(yd, y);
        assert_eq!(delta, 0.0);
    }

    #[test]
    fn relative_level_is_exact() {
        let y: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin() + 1.0).collect();
        for level in [0.01, 0.1, 0.5] {
            let (yd, delta) = add_noise(&y, &NoiseModel::new(level, 3));
            let dist = crate::linalg::dist2(&y, &yd);
            assert!((dist / norm2(&y) - level).abs() < 1e-12);
            assert!((dist - delta).abs() < 1e-12 * delta);
        }
    }

    #[test]
    fn direction_is_unit_and_seeded() {
        let m = NoiseModel::new(0.1, 42);
        let a = m.direction(50);
        assert!((norm2(&a) - 1.0).abs() < 1e-14);
        assert_eq!(a, m.direction(50));
        assert_ne!(a, NoiseModel::new(0.1, 43).direction(50));
    }
}
