use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `q * pi^p * 2^(r/2)`, canonicalized so that `r` is 0 or 1 (even powers
/// of `sqrt 2` are folded into `q`). Equality is then structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymValue {
    q: BigRational,
    p: i32,
    r: i32,
}

impl SymValue {
    pub fn new(q: BigRational, p: i32, r: i32) -> Self {
        let (r_red, fold) = (r.rem_euclid(2), r.div_euclid(2));
        let two = BigRational::from_integer(BigInt::from(2));
        let q = if fold >= 0 { q * pow(&two, fold as u32) } else { q / pow(&two, (-fold) as u32) };
        if q.is_zero() {
            return SymValue { q, p: 0, r: 0 };
        }
        SymValue { q, p, r: r_red }
    }

    pub fn rational(q: BigRational) -> Self {
        Self::new(q, 0, 0)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn pi() -> Self {
        Self::new(BigRational::one(), 1, 0)
    }

    pub fn sqrt2() -> Self {
        Self::new(BigRational::one(), 0, 1)
    }

    /// The exact rational value of a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Self::rational)
            .ok_or_else(|| Error::domain(format!("{x} has no exact rational value")))
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn pi_power(&self) -> i32 {
        self.p
    }

    pub fn sqrt2_power(&self) -> i32 {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(self.q.recip(), -self.p, -self.r))
    }

    pub fn powi(&self, n: i32) -> Option<Self> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        Some(Self::new(pow(&self.q, n as u32), self.p * n, self.r * n))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64_parts(&self.q, self.p, self.r)
    }
}

fn pow(q: &BigRational, n: u32) -> BigRational {
    num_traits::pow(q.clone(), n as usize)
}

fn to_f64_parts(q: &BigRational, p: i32, r: i32) -> f64 {
    // Big factorials overflow f64 individually; go through logarithms when
    // the rational part is out of range.
    let scale = std::f64::consts::PI.powi(p) * std::f64::consts::SQRT_2.powi(r);
    match q.to_f64() {
        Some(v) if v.is_finite() && v != 0.0 => v * scale,
        _ => {
            let ln = ln_big(q.numer()) - ln_big(q.denom());
            let sign = if q.is_negative() { -1.0 } else { 1.0 };
            sign * (ln + scale.ln()).exp()
        }
    }
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Mul for &SymValue {
    type Output = SymValue;
    fn mul(self, o: &SymValue) -> SymValue {
        SymValue::new(&self.q * &o.q, self.p + o.p, self.r + o.r)
    }
}

impl Mul for SymValue {
    type Output = SymValue;
    fn mul(self, o: SymValue) -> SymValue {
        &self * &o
    }
}

impl fmt::Display for SymValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        if self.r == 1 {
            factors.push("sqrt(2)".to_string());
        }
        match self.p {
            0 => {}
            1 => factors.push("pi".into()),
            p => factors.push(format!("pi^{p}")),
        }
        let unit = self.q.abs().is_one();
        match (unit, factors.is_empty()) {
            (true, false) if self.q.is_negative() => write!(f, "-{}", factors.join("*")),
            (true, false) => write!(f, "{}", factors.join("*")),
            _ => write!(f, "{}", std::iter::once(self.q.to_string()).chain(factors).collect::<Vec<_>>().join("*")),
        }
    }
}

/// A finite sum of [`SymValue`] terms, keyed by `(pi power, sqrt 2 power)`.
/// Zero terms are dropped, so two sums are equal iff their maps are equal
/// (pi is transcendental and `sqrt 2` irrational over `Q(pi)`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymSum {
    terms: BTreeMap<(i32, i32), BigRational>,
}

impl SymSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = SymValue> + '_ {
        self.terms.iter().map(|(&(p, r), q)| SymValue::new(q.clone(), p, r))
    }

    /// The single term, if the sum has at most one.
    pub fn as_single(&self) -> Option<SymValue> {
        match self.terms.len() {
            0 => Some(SymValue::integer(0)),
            1 => self.terms().next(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(&(p, r), q)| to_f64_parts(q, p, r)).sum()
    }

    fn push(&mut self, v: &SymValue) {
        if v.is_zero() {
            return;
        }
        let key = (v.p, v.r);
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += &v.q;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }
}

impl From<SymValue> for SymSum {
    fn from(v: SymValue) -> Self {
        let mut s = SymSum::zero();
        s.push(&v);
        s
    }
}

impl Add for &SymSum {
    type Output = SymSum;
    fn add(self, o: &SymSum) -> SymSum {
        let mut s = self.clone();
        for t in o.terms() {
            s.push(&t);
        }
        s
    }
}

impl Mul for &SymSum {
    type Output = SymSum;
    fn mul(self, o: &SymSum) -> SymSum {
        let mut s = SymSum::zero();
        for a in self.terms() {
            for b in o.terms() {
                s.push(&(&a * &b));
            }
        }
        s
    }
}

impl fmt::Display for SymSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn display_forms() {
        assert_eq!(SymValue::pi().powi(9).unwrap().to_string(), "pi^9");
        assert_eq!((SymValue::integer(-1) * SymValue::pi()).to_string(), "-pi");
        assert_eq!(SymValue::new(rat(1, 120), 10, 0).to_string(), "1/120*pi^10");
        assert_eq!(SymValue::new(rat(3, 1), 0, 1).to_string(), "3*sqrt(2)");
        assert_eq!(SymValue::integer(1).to_string(), "1");
    }

    #[test]
    fn canonical_sqrt2_powers() {
        let a = SymValue::new(rat(1, 1), 3, -1);
        let b = SymValue::new(rat(1, 2), 3, 1);
        assert_eq!(a, b);
        assert_eq!(SymValue::sqrt2() * SymValue::sqrt2(), SymValue::integer(2));
    }

    #[test]
    fn to_f64_handles_huge_rationals() {
        // both parts of q overflow f64; the ratio is ~3/7
        let f = factorial(200);
        let q = BigRational::new(BigInt::from(3) * &f, BigInt::from(7) * &f + 1);
        let v = SymValue::new(q, 2, 1);
        let expected = 3.0 / 7.0 * std::f64::consts::PI.powi(2) * 2f64.sqrt();
        assert!((v.to_f64() / expected - 1.0).abs() < 1e-13);
        let w = SymValue::new(BigRational::new(BigInt::one(), factorial(30)), 10, 0);
        assert!((w.to_f64() / (std::f64::consts::PI.powi(10) / 2.652_528_598_121_91e32) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sums_cancel_exactly() {
        let a = SymSum::from(SymValue::new(rat(1, 3), 9, 0));
        let b = SymSum::from(SymValue::new(rat(-1, 3), 9, 0));
        assert!((&a + &b).is_zero());
        let c = SymSum::from(SymValue::new(rat(1, 3), 9, 1));
        assert_eq!((&a + &c).terms().count(), 2);
    }
}
