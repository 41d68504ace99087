//! Scalar backends.
//!
//! Every numeric path in the crate is generic over [`Real`]. `f64` is the
//! working precision; [`Ext`] is a double-double (about 31 significant
//! digits) used by oracles that need headroom over `f64`, such as finite
//! differences of second derivatives or the literal `0/0`-prone formula
//! for the L2 profile near `mu = 1`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use qd::Quad;

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    /// `ln(1 + self)`, accurate for small arguments.
    fn ln_1p(self) -> Self;
    fn sqrt(self) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn recip(self) -> Self {
        Self::one() / self
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

/// Double-double scalar backed by [`qd::Quad`], with accurate (not
/// "sloppy") addition so cancellation keeps ~31 digits of the operands.
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd)]
pub struct Ext(pub Quad);

impl Ext {
    pub fn hi(self) -> f64 {
        self.0 .0
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        Ext(self.0.add_accurate(rhs.0))
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        Ext(self.0.sub_accurate(rhs.0))
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, rhs: Ext) -> Ext {
        Ext(self.0 * rhs.0)
    }
}

impl Div for Ext {
    type Output = Ext;
    fn div(self, rhs: Ext) -> Ext {
        Ext(self.0 / rhs.0)
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext(-self.0)
    }
}

impl Real for Ext {
    fn from_f64(x: f64) -> Self {
        Ext(Quad::from_f64(x))
    }
    fn to_f64(self) -> f64 {
        self.0 .0 + self.0 .1
    }
    fn exp(self) -> Self {
        Ext(self.0.exp())
    }

    fn ln(self) -> Self {
        Ext(self.0.ln())
    }
    fn ln_1p(self) -> Self {
        if self.to_f64().abs() < 1e-2 {
            // 2 atanh(x / (2 + x)); z <= 0.005 so 16 terms reach 1e-36
            let z = self / (Ext::from_f64(2.0) + self);
            let z2 = z * z;
            let mut term = z;
            let mut acc = z;
            for j in 1..16 {
                term = term * z2;
                acc = acc + term / Ext::from_i64(2 * j + 1);
            }
            acc + acc
        } else {
            (Ext::one() + self).ln()
        }
    }
    fn sqrt(self) -> Self {
        Ext(self.0.sqrt())
    }
    fn pi() -> Self {
        Ext(Quad::PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_log_matches_reference_digits() {
        // ln 2 = 0.693147180559945309417232121458176568...
        let l = Ext::from_f64(2.0).ln();
        let err = l - Ext(Quad(std::f64::consts::LN_2, 2.3190468138462996e-17));
        assert!(err.to_f64().abs() < 1e-31);
    }

    #[test]
    fn ext_ln_1p_small_argument() {
        // ln(1 + 1e-4) = 9.99950003333083353331666...e-5 (mpmath, 40 digits)
        let l = Ext::from_f64(1e-4).ln_1p();
        let reference = Ext(Quad(9.999500033330834e-5, 6.374116351940788e-22));
        assert!(((l - reference) / reference).to_f64().abs() < 1e-29);
    }

    #[test]
    fn ext_exp_inverts_ln() {
        for x in [0.5, 2.0, 7.25, 1e3] {
            let e = Ext::from_f64(x);
            let back = e.ln().exp();
            assert!(((back - e) / e).to_f64().abs() < 1e-30, "{x}");
        }
    }

    #[test]
    fn powi_agrees_between_backends() {
        let x = 1.37_f64;
        let a = Real::powi(x, 7);
        let b = Ext::from_f64(x).powi(7).to_f64();
        assert!((a - b).abs() < 1e-14 * b);
    }
}
