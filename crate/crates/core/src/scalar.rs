//! Scalar field abstraction.
//!
//! All algebra in this crate is generic over a field `F: Scalar`. The
//! pipeline is exact only for [`Rational`]; `f64` instantiations compile and
//! are useful for quick numerical sanity checks but carry none of the
//! exact-zero guarantees (sparse canonical form, ħ-independence, flatness).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Zero};

use crate::error::{Error, Result};

/// A field element usable as a series coefficient.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + std::ops::Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer conversion into scalar field")
    }

    /// `n / d` for small integers.
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_int(n) / Self::from_int(d)
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + PartialEq + Num + std::ops::Neg<Output = T> + FromPrimitive + Send + Sync + 'static
{
}

/// Scalars with an exact decimal `num/den` encoding.
pub trait ExactScalar: Scalar + Ord {
    fn to_num_den(&self) -> (String, String);
    fn from_num_den(num: &str, den: &str) -> Result<Self>;

    /// Human-readable form, `n` or `n/d`.
    fn to_text(&self) -> String {
        let (n, d) = self.to_num_den();
        if d == "1" {
            n
        } else {
            format!("{n}/{d}")
        }
    }
}

/// Arbitrary-precision rational in canonical form (reduced, positive denominator).
pub type Rational = BigRational;

impl ExactScalar for BigRational {
    fn to_num_den(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }

    fn from_num_den(num: &str, den: &str) -> Result<Self> {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("invalid integer literal {num:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("invalid integer literal {den:?}")))?;
        if d.is_zero() {
            return Err(Error::Schema("zero denominator".into()));
        }
        // Ratio::new reduces and normalizes the sign of the denominator.
        Ok(BigRational::new(n, d))
    }
}

/// Parse `"n"` or `"n/d"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    match text.split_once('/') {
        Some((n, d)) => Rational::from_num_den(n, d),
        None => Rational::from_num_den(text, "1"),
    }
}

#[cfg(test)]
fn is_canonical(q: &Rational) -> bool {
    use num_integer::Integer;
    use num_traits::{One, Signed};
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}
