use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{int, rat};

/// `a + b sqrt 2` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QSqrt2 { a, b: BigRational::zero() }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn sqrt2() -> Self {
        QSqrt2 { a: BigRational::zero(), b: BigRational::one() }
    }

    /// `1/sqrt 2 = sqrt 2 / 2`.
    pub fn inv_sqrt2() -> Self {
        QSqrt2 { a: BigRational::zero(), b: rat(1, 2) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate `a - b sqrt 2`.
    pub fn conj(&self) -> Self {
        QSqrt2 { a: self.a.clone(), b: -self.b.clone() }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - int(2) * &self.b * &self.b
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QSqrt2 { a: c.a / &n, b: c.b / n })
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        QSqrt2 { a: &self.a * q, b: &self.b * q }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Sign of the real number `a + b sqrt 2`, decided exactly.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // opposite signs: compare a^2 with 2 b^2
        let d = &self.a * &self.a - int(2) * &self.b * &self.b;
        sa * sign(&d)
    }
}

fn sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt(2)", self.b),
            (false, false) => write!(f, "{} + {}*sqrt(2)", self.a, self.b),
        }
    }
}

impl<'a> Add<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { a: &self.a * &o.a + int(2) * &self.b * &o.b, b: &self.a * &o.b + &self.b * &o.a }
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { a: -self.a.clone(), b: -self.b.clone() }
    }
}

/// Complex number over `Q(sqrt 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cx {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Cx {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Cx { re, im }
    }

    pub fn real(re: QSqrt2) -> Self {
        Cx { re, im: QSqrt2::zero() }
    }

    pub fn imag(im: QSqrt2) -> Self {
        Cx { re: QSqrt2::zero(), im }
    }

    pub fn zero() -> Self {
        Self::real(QSqrt2::zero())
    }

    pub fn one() -> Self {
        Self::real(QSqrt2::one())
    }

    pub fn i() -> Self {
        Self::imag(QSqrt2::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Self::real(QSqrt2::from_i64(n))
    }

    /// Gaussian rational `re + i im`.
    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Cx { re: QSqrt2::rational(re), im: QSqrt2::rational(im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Complex conjugate (the `sqrt 2` parts are real and untouched).
    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, s: &QSqrt2) -> Self {
        Cx { re: &self.re * s, im: &self.im * s }
    }

    pub fn recip(&self) -> Option<Self> {
        let n = &(&self.re * &self.re) + &(&self.im * &self.im);
        let inv = n.recip()?;
        Some(self.conj().scale(&inv))
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})i", self.im)
        } else {
            write!(f, "{} + ({})i", self.re, self.im)
        }
    }
}

impl<'a> Add<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        Cx { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        Cx { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        Cx { re: &(&self.re * &o.re) - &(&self.im * &o.im), im: &(&self.re * &o.im) + &(&self.im * &o.re) }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -&self.re, im: -&self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squares_to_two() {
        let s = QSqrt2::sqrt2();
        assert_eq!(&s * &s, QSqrt2::from_i64(2));
        assert_eq!(&QSqrt2::inv_sqrt2() * &s, QSqrt2::one());
    }

    #[test]
    fn reciprocals() {
        let x = QSqrt2::new(rat(3, 2), rat(-5, 7));
        assert_eq!(&x * &x.recip().unwrap(), QSqrt2::one());
        let z = Cx::new(x.clone(), QSqrt2::sqrt2());
        assert_eq!(&z * &z.recip().unwrap(), Cx::one());
        assert!(QSqrt2::zero().recip().is_none());
    }

    #[test]
    fn i_squared() {
        assert_eq!(&Cx::i() * &Cx::i(), Cx::from_i64(-1));
    }

    #[test]
    fn exact_sign() {
        // 7 - 5 sqrt2 ~ -0.07, 3 - 2 sqrt 2 ~ 0.17
        assert_eq!(QSqrt2::new(int(7), int(-5)).signum(), -1);
        assert_eq!(QSqrt2::new(int(3), int(-2)).signum(), 1);
        assert_eq!(QSqrt2::new(int(-3), int(2)).signum(), -1);
        assert_eq!(QSqrt2::zero().signum(), 0);
    }
}
