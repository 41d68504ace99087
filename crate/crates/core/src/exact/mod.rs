//! Exact scalars: the field `Q(sqrt 2)(i)` for Lie-algebra identities and
//! `q * pi^p * 2^(r/2)` constants for closed-form volumes and actions.

mod field;
mod symbolic;

pub use field::{Cx, QSqrt2};
pub use symbolic::{factorial, SymSum, SymValue};

use num_bigint::BigInt;
use num_rational::BigRational;

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
