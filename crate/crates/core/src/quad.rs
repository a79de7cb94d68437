//! Exact arithmetic in `Q(sqrt D)`: elements `a + b sqrt(D)` with rational
//! coordinates over a fixed radicand.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    pub a: BigRational,
    pub b: BigRational,
    pub rad: BigInt,
}

impl QuadNum {
    pub fn new(a: BigRational, b: BigRational, rad: BigInt) -> Self {
        QuadNum { a, b, rad }
    }

    pub fn from_rational(a: BigRational, rad: BigInt) -> Self {
        QuadNum { a, b: BigRational::zero(), rad }
    }

    pub fn from_surd(s: &Surd) -> Self {
        let q = s.q().clone();
        QuadNum {
            a: BigRational::new(s.p().clone(), q.clone()),
            b: BigRational::new(BigInt::one(), q),
            rad: s.d().clone(),
        }
    }

    pub fn conj(&self) -> Self {
        QuadNum { a: self.a.clone(), b: -&self.b, rad: self.rad.clone() }
    }

    /// `a^2 - D b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.rad.clone())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm();
        QuadNum { a: &self.a / &n, b: -&self.b / &n, rad: self.rad.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of the real value (D is not a square, so zero only when a = b = 0).
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with D b^2
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * BigRational::from_integer(self.rad.clone());
        if a2 > db2 {
            sa
        } else {
            sb
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }

    pub fn to_f64(&self) -> f64 {
        let a = crate::cfe::ratio_to_f64(&self.a);
        let b = crate::cfe::ratio_to_f64(&self.b);
        let r = crate::hp::HpReal::from_int(crate::arith::isqrt(&(&self.rad << 128usize)));
        a + b * r.to_f64() / 2f64.powi(64)
    }
}

impl Add for QuadNum {
    type Output = QuadNum;
    fn add(self, o: QuadNum) -> QuadNum {
        debug_assert_eq!(self.rad, o.rad);
        QuadNum { a: self.a + o.a, b: self.b + o.b, rad: self.rad }
    }
}

impl Sub for QuadNum {
    type Output = QuadNum;
    fn sub(self, o: QuadNum) -> QuadNum {
        debug_assert_eq!(self.rad, o.rad);
        QuadNum { a: self.a - o.a, b: self.b - o.b, rad: self.rad }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a, b: -self.b, rad: self.rad }
    }
}

impl Mul for QuadNum {
    type Output = QuadNum;
    fn mul(self, o: QuadNum) -> QuadNum {
        debug_assert_eq!(self.rad, o.rad);
        let d = BigRational::from_integer(self.rad.clone());
        QuadNum {
            a: &self.a * &o.a + &self.b * &o.b * d,
            b: &self.a * &o.b + &self.b * &o.a,
            rad: self.rad,
        }
    }
}
