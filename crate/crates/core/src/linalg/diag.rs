use crate::error::{check_len, Result};
use crate::Real;

/// Diagonal linear map, used for the gradient and Hessian representations of
/// the superposition operators.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator<T> {
    diagonal: Vec<T>,
}

impl<T: Real> DiagonalOperator<T> {
    pub fn new(diagonal: Vec<T>) -> Self {
        Self { diagonal }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![T::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    pub fn into_diagonal(self) -> Vec<T> {
        self.diagonal
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("diagonal apply", self.diagonal.len(), x.len())?;
        Ok(self.diagonal.iter().zip(x).map(|(&d, &v)| d * v).collect())
    }

    pub fn apply_in_place(&self, x: &mut [T]) -> Result<()> {
        check_len("diagonal apply", self.diagonal.len(), x.len())?;
        for (v, &d) in x.iter_mut().zip(&self.diagonal) {
            *v *= d;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplies_componentwise() {
        let d = DiagonalOperator::new(vec![2.0, -1.0, 0.5]);
        assert_eq!(d.apply(&[1.0, 2.0, 4.0]).unwrap(), vec![2.0, -2.0, 2.0]);
        assert!(d.apply(&[1.0]).is_err());
    }
}
