use num_traits::{One, Zero};
use thiserror::Error;

use super::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dimension mismatch: {left} vs {right}")]
pub struct DimensionMismatch {
    pub left: usize,
    pub right: usize,
}

/// Similitude without rotation: `x ↦ scale·x + shift`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub scale: Rational,
    pub shift: Vec<Rational>,
}

impl Affine {
    pub fn new(scale: Rational, shift: Vec<Rational>) -> Self {
        Self { scale, shift }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            scale: Rational::one(),
            shift: vec![Rational::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Affine) -> Result<Affine, DimensionMismatch> {
        if self.dim() != inner.dim() {
            return Err(DimensionMismatch {
                left: self.dim(),
                right: inner.dim(),
            });
        }
        let shift = self
            .shift
            .iter()
            .zip(&inner.shift)
            .map(|(outer, inner)| &self.scale * inner + outer)
            .collect();
        Ok(Affine {
            scale: &self.scale * &inner.scale,
            shift,
        })
    }

    pub fn apply(&self, point: &[Rational]) -> Vec<Rational> {
        point
            .iter()
            .zip(&self.shift)
            .map(|(x, b)| &self.scale * x + b)
            .collect()
    }
}
