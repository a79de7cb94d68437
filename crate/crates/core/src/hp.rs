//! Binary floating point with an arbitrary-precision mantissa, used to
//! evaluate surds to a requested number of bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// The real number `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    pub mant: BigInt,
    pub exp: i64,
}

impl HpReal {
    pub fn from_int(n: BigInt) -> Self {
        HpReal { mant: n, exp: 0 }
    }

    /// Rounds `num / den` (den > 0) to roughly `bits` significant bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u64) -> Self {
        debug_assert!(den.is_positive());
        if num.is_zero() {
            return HpReal { mant: BigInt::zero(), exp: 0 };
        }
        let t = bits as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let t = t.max(0);
        let mant = (num << t as usize) / den;
        HpReal { mant, exp: -t }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 60 {
            let shift = bits - 60;
            (&self.mant >> shift as usize, self.exp + shift)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = m.to_f64().unwrap();
        ldexp(m, e)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            let den = BigInt::from(1) << (-self.exp) as usize;
            self.mant.div_floor(&den)
        }
    }

    /// Decimal rendering with `digits` fractional digits (truncated).
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = HpReal {
            mant: self.mant.abs() * &scale,
            exp: self.exp,
        }
        .floor();
        let neg = self.mant.is_negative();
        let (int, frac) = scaled.div_rem(&scale);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&int.to_string());
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
        }
        s
    }
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Some(a.cmp(&b))
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_decimal(digits))
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_floor() {
        let x = HpReal::from_ratio(&BigInt::from(-7), &BigInt::from(2), 64);
        assert_eq!(x.floor(), BigInt::from(-4));
        assert!((x.to_f64() + 3.5).abs() < 1e-15);
        assert_eq!(x.to_decimal(3), "-3.500");
    }

    #[test]
    fn integers_exact() {
        let x = HpReal::from_int(BigInt::from(12345));
        assert_eq!(x.to_f64(), 12345.0);
        assert_eq!(x.floor(), BigInt::from(12345));
    }
}
