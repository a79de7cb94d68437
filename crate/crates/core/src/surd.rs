//! Exact real quadratic irrationals `(p + sqrt(d)) / q`.
//!
//! A [`Surd`] always satisfies `q | d - p^2`. This makes the Gauss map an
//! integer-only recurrence and keeps the radicand fixed along a Gauss orbit.
//! The representative is canonical: among all valid triples
//! `(k p0, k q0, k^2 d0)` describing the same real number, the one with the
//! smallest `k` is stored, so field-wise equality is equality of values.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_square, isqrt};
use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::mat::RationalMat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SurdJson", into = "SurdJson")]
pub struct Surd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

#[derive(Serialize, Deserialize)]
struct SurdJson {
    p: String,
    d: String,
    q: String,
}

impl From<Surd> for SurdJson {
    fn from(s: Surd) -> Self {
        SurdJson {
            p: s.p.to_string(),
            d: s.d.to_string(),
            q: s.q.to_string(),
        }
    }
}

impl TryFrom<SurdJson> for Surd {
    type Error = Error;
    fn try_from(j: SurdJson) -> Result<Self> {
        let parse = |x: &str| {
            BigInt::from_str(x).map_err(|_| Error::Config(format!("not an integer: {x:?}")))
        };
        Surd::new(parse(&j.p)?, parse(&j.d)?, parse(&j.q)?)
    }
}

impl Surd {
    /// Canonical surd with value `(p + sqrt(d)) / q`.
    pub fn new(p: BigInt, d: BigInt, q: BigInt) -> Result<Self> {
        if !d.is_positive() || is_square(&d) {
            return Err(Error::InvalidRadicand(d.to_string()));
        }
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(p, d, q))
    }

    pub fn from_i64(p: i64, d: i64, q: i64) -> Result<Self> {
        Self::new(p.into(), d.into(), q.into())
    }

    /// `sqrt(d)`.
    pub fn sqrt(d: i64) -> Result<Self> {
        Self::from_i64(0, d, 1)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    // Inputs must have d > 0 non-square and q != 0. Reads the triple off
    // the primitive minimal polynomial A x^2 + B x + C, A > 0, so only gcds
    // are needed.
    fn canonical(p: BigInt, d: BigInt, q: BigInt) -> Self {
        // q x^2 - 2p x + (p^2 - d)/q, scaled to integers first if needed
        let (p, d, q) = if (&d - &p * &p).is_multiple_of(&q) {
            (p, d, q)
        } else {
            let qa = q.abs();
            (p * &qa, d * &q * &q, q * qa)
        };
        let c = (&p * &p - &d) / &q;
        let b = BigInt::from(-2) * &p;
        let g = q.gcd(&b).gcd(&c);
        let sigma = if q.is_negative() { -BigInt::one() } else { BigInt::one() };
        let a = q.abs() / &g;
        let b = &b * &sigma / &g;
        let c = &c * &sigma / &g;
        let disc = &b * &b - BigInt::from(4) * &a * &c;
        if b.is_even() {
            Surd {
                p: -(&b / BigInt::from(2)) * &sigma,
                d: disc / BigInt::from(4),
                q: a * sigma,
            }
        } else {
            Surd {
                p: -b * &sigma,
                d: disc,
                q: BigInt::from(2) * a * sigma,
            }
        }
    }

    /// Fast constructor for triples already known to satisfy `q | d - p^2`;
    /// re-canonicalizes only when a common factor could exist.
    fn from_valid(p: BigInt, d: BigInt, q: BigInt) -> Self {
        debug_assert!((&d - &p * &p).is_multiple_of(&q));
        let g = p.gcd(&q);
        if g.is_one() || g.gcd(&d).is_one() {
            Surd { p, d, q }
        } else {
            Self::canonical(p, d, q)
        }
    }

    /// Checks the representation invariants.
    pub fn validate(&self) -> Result<()> {
        if !self.d.is_positive() || is_square(&self.d) {
            return Err(Error::Invariant(format!("bad radicand in {self}")));
        }
        if self.q.is_zero() || !(&self.d - &self.p * &self.p).is_multiple_of(&self.q) {
            return Err(Error::Invariant(format!("q does not divide d - p^2 in {self}")));
        }
        let c = Self::canonical(self.p.clone(), self.d.clone(), self.q.clone());
        if c != *self {
            return Err(Error::Invariant(format!("{self} is not canonical")));
        }
        Ok(())
    }

    /// `floor` of the value, exactly.
    pub fn floor(&self) -> BigInt {
        let r = isqrt(&self.d);
        if self.q.is_positive() {
            (&self.p + r).div_floor(&self.q)
        } else {
            (&self.p + r + BigInt::one()).div_floor(&self.q)
        }
    }

    /// Galois conjugate `(p - sqrt(d)) / q`.
    pub fn conj(&self) -> Self {
        Surd {
            p: -&self.p,
            d: self.d.clone(),
            q: -&self.q,
        }
    }

    pub fn add_int(&self, n: &BigInt) -> Self {
        Surd::from_valid(&self.p + n * &self.q, self.d.clone(), self.q.clone())
    }

    /// Fractional part, in (0, 1).
    pub fn frac(&self) -> Self {
        self.add_int(&-self.floor())
    }

    /// `1/s`, exactly.
    pub fn recip(&self) -> Self {
        // 1/s = q (sqrt d - p) / (d - p^2) = (-p + sqrt d) / q1
        let q1 = (&self.d - &self.p * &self.p) / &self.q;
        Surd::from_valid(-&self.p, self.d.clone(), q1)
    }

    /// One step of the Gauss map `x -> 1/x - floor(1/x)` on `0 < x < 1`.
    ///
    /// Returns the digit `floor(1/x)` and the image; the radicand is
    /// unchanged unless canonicalization removes a square factor.
    pub fn gauss_step(&self) -> Result<(BigInt, Surd)> {
        if !self.in_unit_interval() {
            return Err(Error::OutOfRange(format!("{self} is not in (0, 1)")));
        }
        Ok(self.gauss_step_unchecked())
    }

    pub(crate) fn gauss_step_unchecked(&self) -> (BigInt, Surd) {
        let q1 = (&self.d - &self.p * &self.p) / &self.q;
        let r = isqrt(&self.d);
        // floor((-p + sqrt d) / q1), q1 > 0 whenever 0 < x < 1
        let a = if q1.is_positive() {
            (&r - &self.p).div_floor(&q1)
        } else {
            (&r + BigInt::one() - &self.p).div_floor(&q1)
        };
        let p1 = -&self.p - &a * &q1;
        (a, Surd::from_valid(p1, self.d.clone(), q1))
    }

    pub fn in_unit_interval(&self) -> bool {
        self.floor().is_zero()
    }

    /// Möbius action `(a s + b) / (c s + d)`.
    pub fn moebius(&self, m: &RationalMat) -> Surd {
        let (p, q, d) = (&self.p, &self.q, &self.d);
        let u = &m.a * p + &m.b * q;
        let w = &m.c * p + &m.d * q;
        let x = &u * &w - &m.a * &m.c * d;
        let n = &w * &w - &m.c * &m.c * d;
        let v = m.det() * q;
        let rad = &v * &v * d;
        if v.is_negative() {
            Surd::canonical(-x, rad, -n)
        } else {
            Surd::canonical(x, rad, n)
        }
    }

    /// Value > 1 with conjugate in (-1, 0).
    pub fn is_reduced(&self) -> bool {
        self.floor() >= BigInt::one() && self.conj().floor() == -BigInt::one()
    }

    /// Compares the value with a rational number.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // sign((p + sqrt d)/q - a/b) with b > 0
        let (a, b) = (r.numer(), r.denom());
        let u = &self.p * b - a * &self.q;
        let bb = b * b * &self.d;
        let s = if !u.is_negative() {
            Ordering::Greater
        } else if &u * &u > bb {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        if self.q.is_positive() {
            s
        } else {
            s.reverse()
        }
    }

    /// Evaluates the value with relative error at most `2^(1 - bits)`.
    pub fn eval_hp(&self, bits: u64) -> HpReal {
        let s = bits + 8;
        let root = isqrt(&(&self.d << (2 * s as usize)));
        let scale = BigInt::one() << s as usize;
        // Avoid cancellation by rationalizing when p < 0.
        let (num, den) = if !self.p.is_negative() {
            (&self.p * &scale + root, &self.q * &scale)
        } else {
            let n = (&self.d - &self.p * &self.p) * &scale;
            let m = &self.q * (root - &self.p * &scale);
            (n, m)
        };
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        HpReal::from_ratio(&num, &den, bits)
    }

    pub fn to_f64(&self) -> f64 {
        self.eval_hp(64).to_f64()
    }

    /// Coefficients `(A, B, C)` of the primitive minimal polynomial
    /// `A x^2 + B x + C` with `A > 0`.
    pub fn min_poly(&self) -> (BigInt, BigInt, BigInt) {
        let q1 = (&self.d - &self.p * &self.p) / &self.q;
        let (a, b, c) = (self.q.clone(), -BigInt::from(2) * &self.p, -q1);
        let g = a.gcd(&b).gcd(&c);
        let sgn = if a.is_negative() { -BigInt::one() } else { BigInt::one() };
        (&a / &g * &sgn, &b / &g * &sgn, &c / &g * &sgn)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + sqrt({}))/{}", self.p, self.d, self.q)
    }
}

/// Parses `P,D,Q`.
impl FromStr for Surd {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("expected P,D,Q, got {s:?}")));
        }
        let parse = |x: &str| {
            BigInt::from_str(x).map_err(|_| Error::Config(format!("not an integer: {x:?}")))
        };
        Surd::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }
}
