//! Minimal additive structure shared by every series coefficient type.

use std::fmt::Debug;

use crate::laurent::Laurent;
use crate::scalar::Scalar;

/// A coefficient that can live inside a sparse series.
///
/// Zero coefficients are never stored, so `is_zero` must be exact for the
/// canonical-form guarantees to hold.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn negate(&self) -> Self;
}

/// Coefficients closed under an associative product.
pub trait CoeffMul: Coeff {
    fn mul_ref(&self, other: &Self) -> Self;
}

/// Coefficients that can be scaled by an element of the Laurent ring.
pub trait Module: Coeff {
    type Field: Scalar;
    fn scale_by(&self, c: &Laurent<Self::Field>) -> Self;
}
