//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] stores normalized Taylor coefficients `c[n] = f^(n)(x0) / n!`
//! of a function around a base point, up to a runtime order bounded by
//! [`JET_CAPACITY`]` - 1`. Binary operations truncate to the smaller order.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

pub const JET_CAPACITY: usize = 6;

/// Order used by the geometry kernels: C'' needs A through its fourth
/// derivative, plus one order lost to the `0/0` shift at `mu = 1`.
pub const WORKING_ORDER: usize = JET_CAPACITY - 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    c: [T; JET_CAPACITY],
    len: usize,
}

/// A value with its first and second derivatives.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 { value, d1: 0.0, d2: 0.0 }
    }
}

impl<T: Real> Jet<T> {
    fn with_order(order: usize) -> Self {
        assert!(order < JET_CAPACITY, "jet order {order} exceeds capacity");
        Jet { c: [T::zero(); JET_CAPACITY], len: order + 1 }
    }

    pub fn constant(value: T, order: usize) -> Self {
        let mut j = Self::with_order(order);
        j.c[0] = value;
        j
    }

    /// The identity function `x -> x` expanded at `x0`.
    pub fn variable(x0: T, order: usize) -> Self {
        let mut j = Self::with_order(order);
        j.c[0] = x0;
        if order >= 1 {
            j.c[1] = T::one();
        }
        j
    }

    pub fn from_coeffs(coeffs: &[T]) -> Self {
        let mut j = Self::with_order(coeffs.len() - 1);
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        j
    }

    pub fn order(&self) -> usize {
        self.len - 1
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn coeff(&self, n: usize) -> T {
        self.c[n]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c[..self.len]
    }

    /// `n`-th derivative at the base point.
    pub fn derivative(&self, n: usize) -> T {
        let mut fact = T::one();
        for i in 2..=n {
            fact = fact * T::from_i64(i as i64);
        }
        self.c[n] * fact
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut j = *self;
        j.len = order.min(self.order()) + 1;
        for x in j.c[j.len..].iter_mut() {
            *x = T::zero();
        }
        j
    }

    /// Jet of the derivative function; one order shorter.
    pub fn differentiate(&self) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let mut j = Self::with_order(self.order() - 1);
        for n in 0..j.len {
            j.c[n] = self.c[n + 1] * T::from_i64(n as i64 + 1);
        }
        j
    }

    pub fn scale(&self, s: T) -> Self {
        let mut j = *self;
        for x in j.c[..j.len].iter_mut() {
            *x = *x * s;
        }
        j
    }

    pub fn add_scalar(&self, s: T) -> Self {
        let mut j = *self;
        j.c[0] = j.c[0] + s;
        j
    }

    pub fn recip(&self) -> Self {
        Self::constant(T::one(), self.order()) / *self
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(T::one(), self.order());
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    pub fn ln(&self) -> Self {
        self.log_with(self.c[0].ln(), self.c[0])
    }

    /// `ln(1 + f)` where `f` is this jet.
    pub fn ln_1p(&self) -> Self {
        self.log_with(self.c[0].ln_1p(), T::one() + self.c[0])
    }

    // q' = g'/g  =>  n q_n g_0 = n g_n - sum_{j=1}^{n-1} j q_j g_{n-j}
    fn log_with(&self, value: T, g0: T) -> Self {
        let mut q = Self::with_order(self.order());
        q.c[0] = value;
        for n in 1..self.len {
            let mut s = T::from_i64(n as i64) * self.c[n];
            for j in 1..n {
                s = s - T::from_i64(j as i64) * q.c[j] * self.c[n - j];
            }
            q.c[n] = s / (T::from_i64(n as i64) * g0);
        }
        q
    }

    /// Polynomial `sum p_i x^i` evaluated on this jet (Horner).
    pub fn polynomial(&self, p: &[T]) -> Self {
        let mut acc = Self::constant(T::zero(), self.order());
        for &coef in p.iter().rev() {
            acc = (acc * *self).add_scalar(coef);
        }
        acc
    }

    /// Quotient of two jets that may both vanish at the base point.
    ///
    /// Leading zero coefficients common to numerator and denominator are
    /// cancelled (one order of accuracy is lost per cancelled zero), which
    /// evaluates removable `0/0` singularities exactly.
    pub fn div_removable(&self, den: &Self) -> Self {
        let mut num = *self;
        let mut den = *den;
        while den.c[0].is_zero() && num.c[0].is_zero() && num.order() >= 1 && den.order() >= 1 {
            num = num.shift_down();
            den = den.shift_down();
        }
        num / den
    }

    fn shift_down(&self) -> Self {
        let mut j = Self::with_order(self.order() - 1);
        j.c[..j.len].copy_from_slice(&self.c[1..self.len]);
        j
    }

    /// Convert to a value/first/second-derivative triple. The jet must have
    /// order at least 2.
    pub fn to_jet2(&self) -> Jet2 {
        assert!(self.order() >= 2, "order-{} jet has no second derivative", self.order());
        Jet2 { value: self.c[0].to_f64(), d1: self.derivative(1).to_f64(), d2: self.derivative(2).to_f64() }
    }
}

fn common_order<T: Real>(a: &Jet<T>, b: &Jet<T>) -> usize {
    a.order().min(b.order())
}

impl<T: Real> Add for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Jet<T>) -> Jet<T> {
        let mut j = Jet::with_order(common_order(&self, &rhs));
        for n in 0..j.len {
            j.c[n] = self.c[n] + rhs.c[n];
        }
        j
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Jet<T>) -> Jet<T> {
        let mut j = Jet::with_order(common_order(&self, &rhs));
        for n in 0..j.len {
            j.c[n] = self.c[n] - rhs.c[n];
        }
        j
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Jet<T>) -> Jet<T> {
        let mut j = Jet::with_order(common_order(&self, &rhs));
        for n in 0..j.len {
            let mut s = T::zero();
            for i in 0..=n {
                s = s + self.c[i] * rhs.c[n - i];
            }
            j.c[n] = s;
        }
        j
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: Jet<T>) -> Jet<T> {
        let mut q = Jet::with_order(common_order(&self, &rhs));
        for n in 0..q.len {
            let mut s = self.c[n];
            for i in 0..n {
                s = s - q.c[i] * rhs.c[n - i];
            }
            q.c[n] = s / rhs.c[0];
        }
        q
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Add<T> for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        self.add_scalar(rhs)
    }
}

impl<T: Real> Sub<T> for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: T) -> Jet<T> {
        self.add_scalar(-rhs)
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Div<T> for Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: T) -> Jet<T> {
        self.scale(rhs.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Ext;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn product_rule_matches_closed_form() {
        // f(x) = x^2 * ln x at x = 2: f' = 2x ln x + x, f'' = 2 ln x + 3
        let x = Jet::variable(2.0_f64, 3);
        let f = x * x * x.ln();
        let l2 = 2.0_f64.ln();
        assert!(close(f.value(), 4.0 * l2, 1e-15));
        assert!(close(f.derivative(1), 4.0 * l2 + 2.0, 1e-15));
        assert!(close(f.derivative(2), 2.0 * l2 + 3.0, 1e-15));
        assert!(close(f.derivative(3), 1.0, 1e-14));
    }

    #[test]
    fn quotient_and_reciprocal() {
        // 1/(1+x^2) at x = 1: values 1/2, -1/2, 1/2
        let x = Jet::variable(1.0_f64, 2);
        let f = (x * x + 1.0).recip();
        assert!(close(f.value(), 0.5, 1e-15));
        assert!(close(f.derivative(1), -0.5, 1e-15));
        assert!(close(f.derivative(2), 0.5, 1e-15));
    }

    #[test]
    fn ln_1p_agrees_with_ln() {
        let e = Jet::variable(0.3_f64, 4);
        let a = e.ln_1p();
        let b = (e + 1.0).ln();
        for n in 0..=4 {
            assert!(close(a.coeff(n), b.coeff(n), 1e-14), "order {n}");
        }
    }

    #[test]
    fn removable_division_cancels_common_zero() {
        // sin-free example: (x^2 + 2x) / (3x) at x = 0 -> (x + 2)/3
        let x = Jet::variable(0.0_f64, 4);
        let num = x * x + x * 2.0;
        let den = x * 3.0;
        let q = num.div_removable(&den);
        assert_eq!(q.order(), 3);
        assert!(close(q.value(), 2.0 / 3.0, 1e-15));
        assert!(close(q.derivative(1), 1.0 / 3.0, 1e-15));
        assert!(q.derivative(2).abs() < 1e-15);
    }

    #[test]
    fn differentiate_shifts_coefficients() {
        let x = Jet::variable(1.5_f64, 4);
        let f = x.powi(4);
        let df = f.differentiate();
        assert_eq!(df.order(), 3);
        assert!(close(df.value(), 4.0 * 1.5_f64.powi(3), 1e-15));
        assert!(close(df.derivative(1), 12.0 * 1.5_f64.powi(2), 1e-15));
    }

    #[test]
    fn extended_backend_runs_same_arithmetic() {
        let x = Jet::variable(Ext::from_f64(3.0), 2);
        let f = x.ln() * x;
        assert!(close(f.derivative(1).to_f64(), 3.0_f64.ln() + 1.0, 1e-15));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Leibniz rule on the second derivative channel.
            #[test]
            fn second_derivative_leibniz(x0 in 0.2f64..5.0, a in -2.0f64..2.0) {
                let x = Jet::variable(x0, 2);
                let f = (x * a).add_scalar(1.0) * x.ln();
                let g = x * x;
                let lhs = (f * g).derivative(2);
                let rhs = f.derivative(2) * g.value()
                    + 2.0 * f.derivative(1) * g.derivative(1)
                    + f.value() * g.derivative(2);
                prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs()));
            }

            #[test]
            fn quotient_inverts_product(x0 in 0.5f64..3.0) {
                let x = Jet::variable(x0, 5);
                let f = x.ln_1p() + x.powi(3);
                let g = x + 2.0;
                let back = (f * g) / g;
                for n in 0..=5 {
                    prop_assert!((back.coeff(n) - f.coeff(n)).abs() <= 1e-12 * (1.0 + f.coeff(n).abs()));
                }
            }
        }
    }
}
