use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

/// Real scalar type used by the moment-based linear algebra.
///
/// Implemented for `f64` and for double-double `TwoFloat`, so ill-conditioned
/// moment systems can be rerun in roughly 106-bit precision without code changes.
pub trait Scalar:
    Copy
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Machine epsilon of the representation.
    fn epsilon() -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn epsilon() -> f64 {
        f64::EPSILON
    }
}

/// Double-double scalar backed by `twofloat` arithmetic.
///
/// Division is done here by residual correction: `TwoFloat / TwoFloat` in
/// twofloat 0.8 forms `1 - b*(1/b)` without a fused multiply-add, which
/// leaves the quotient at binary64 accuracy.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        DoubleDouble(self.0 + rhs.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        DoubleDouble(self.0 - rhs.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        DoubleDouble(self.0 * rhs.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b = rhs.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        DoubleDouble(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl Scalar for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble(TwoFloat::from(x))
    }
    fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    fn abs(self) -> Self {
        DoubleDouble(self.0.abs())
    }
    fn sqrt(self) -> Self {
        DoubleDouble(self.0.sqrt())
    }
    fn epsilon() -> f64 {
        // 2^-104
        4.930380657631324e-32
    }
}

/// Evaluate `T_0..T_{n-1}` at `x` (on [-1,1] coordinates) in the scalar type.
pub fn chebyshev_t_values<S: Scalar>(x: S, n: usize) -> Vec<S> {
    let mut t = Vec::with_capacity(n);
    if n == 0 {
        return t;
    }
    t.push(S::one());
    if n == 1 {
        return t;
    }
    t.push(x);
    let two_x = x + x;
    for k in 2..n {
        let next = two_x * t[k - 1] - t[k - 2];
        t.push(next);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twofloat_roundtrip() {
        let x = DoubleDouble::from_f64(0.1);
        assert_eq!(x.to_f64(), 0.1);
        let third = DoubleDouble::one() / DoubleDouble::from_f64(3.0);
        let back = third * DoubleDouble::from_f64(3.0) - DoubleDouble::one();
        assert!(back.0.hi().abs() < 1e-31);
        let r = DoubleDouble::from_f64(2.0).sqrt();
        assert!((r * r - DoubleDouble::from_f64(2.0)).0.hi().abs() < 1e-31);
    }

    #[test]
    fn chebyshev_values_match_cosines() {
        let th: f64 = 0.7;
        let t = chebyshev_t_values(th.cos(), 10);
        for (k, v) in t.iter().enumerate() {
            assert!((v - (k as f64 * th).cos()).abs() < 1e-14);
        }
    }
}
