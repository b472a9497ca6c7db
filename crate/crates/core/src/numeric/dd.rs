//! Double-double real numbers.
//!
//! A thin wrapper over `twofloat::TwoFloat`, which supplies error-free
//! addition and multiplication. Its double-by-double division forms
//! `1 - b·(1/b)` without a fused multiply-add and so only delivers f64
//! accuracy; division here is redone with two correction steps.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};
use twofloat::TwoFloat;

#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Dd(TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }

    pub fn abs(self) -> Dd {
        Dd(self.0.abs())
    }

    pub fn sqrt(self) -> Dd {
        Dd(self.0.sqrt())
    }

    pub fn is_finite(self) -> bool {
        self.0.hi().is_finite()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
}

impl From<i64> for Dd {
    fn from(x: i64) -> Self {
        Dd(TwoFloat::from(x))
    }
}

impl From<Dd> for f64 {
    fn from(x: Dd) -> f64 {
        x.to_f64()
    }
}

impl PartialEq<f64> for Dd {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Dd {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let b = rhs.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        Dd(self.0 % rhs.0)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, rhs: Dd) {
        *self = *self * rhs;
    }
}

impl DivAssign for Dd {
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl RemAssign for Dd {
    fn rem_assign(&mut self, rhs: Dd) {
        *self = *self % rhs;
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd::from(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::from(1.0)
    }
}

impl Num for Dd {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Dd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_is_double_double_accurate() {
        let x = Dd::from(0.1) * Dd::from(0.7) - Dd::from(-0.2) * Dd::from(0.1);
        let y = Dd::from(0.7) * Dd::from(0.7) + Dd::from(0.2) * Dd::from(0.2);
        let q = x / y;
        assert!((q * y - x).abs().to_f64() < 1e-32);
        let third = Dd::from(1.0) / Dd::from(3.0);
        assert!((third * Dd::from(3.0) - Dd::from(1.0)).abs().to_f64() < 1e-32);
    }

    #[test]
    fn sqrt_is_accurate() {
        let two = Dd::from(2.0);
        let s = two.sqrt();
        assert!((s * s - two).abs().to_f64() < 1e-31);
    }
}
