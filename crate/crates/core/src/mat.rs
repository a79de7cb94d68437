//! 2x2 matrices over the integers, used as coprime representatives of
//! elements of PGL2(Q).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of PGL2(Q) stored as its primitive integer representative
/// `[[a, b], [c, d]]` (entry content 1, nonzero determinant).
///
/// The sign of the representative is kept as given, so products of
/// unimodular matrices stay exact in GL2(Z).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalMat {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl RationalMat {
    /// Builds the primitive representative of `[[a, b], [c, d]]`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let g = a.gcd(&b).gcd(&c).gcd(&d);
        if g.is_zero() {
            return Err(Error::InvalidMatrix("zero matrix".into()));
        }
        let m = RationalMat {
            a: a / &g,
            b: b / &g,
            c: c / &g,
            d: d / &g,
        };
        if m.det().is_zero() {
            return Err(Error::InvalidMatrix("singular matrix".into()));
        }
        Ok(m)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Clears denominators of a rational matrix.
    pub fn from_rationals(e: [BigRational; 4]) -> Result<Self> {
        let den = e.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let f = |x: &BigRational| (x * BigRational::from_integer(den.clone())).to_integer();
        Self::new(f(&e[0]), f(&e[1]), f(&e[2]), f(&e[3]))
    }

    pub fn identity() -> Self {
        Self::raw(1.into(), 0.into(), 0.into(), 1.into())
    }

    pub fn swap() -> Self {
        Self::raw(0.into(), 1.into(), 1.into(), 0.into())
    }

    pub fn diag(x: BigInt, y: BigInt) -> Result<Self> {
        Self::new(x, BigInt::zero(), BigInt::zero(), y)
    }

    /// Matrix of a rational scaling `x -> q x`.
    pub fn scaling(q: &BigRational) -> Result<Self> {
        Self::diag(q.numer().clone(), q.denom().clone())
    }

    pub(crate) fn raw(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        RationalMat { a, b, c, d }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// `|det|` of the primitive representative.
    pub fn height(&self) -> BigInt {
        self.det().abs()
    }

    pub fn is_unimodular(&self) -> bool {
        self.height().is_one()
    }

    /// Exact integer product; the result is not re-normalized.
    pub fn mul_exact(&self, o: &Self) -> Self {
        Self::raw(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    /// Product in PGL2(Q) (content removed).
    pub fn mul(&self, o: &Self) -> Self {
        let m = self.mul_exact(o);
        Self::new(m.a, m.b, m.c, m.d).expect("product of invertible matrices")
    }

    /// Adjugate, i.e. the inverse up to the scalar `det`.
    pub fn adjugate(&self) -> Self {
        Self::raw(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Inverse in GL2(Z) for unimodular matrices.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        let det = self.det();
        if det.is_one() {
            Some(self.adjugate())
        } else if det == -BigInt::one() {
            let adj = self.adjugate();
            Some(Self::raw(-adj.a, -adj.b, -adj.c, -adj.d))
        } else {
            None
        }
    }

    /// Exact integer power by squaring, content removed at the end.
    pub fn pow(&self, k: u64) -> Self {
        let mut result = Self::identity();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Equality in PGL2(Q).
    pub fn proj_eq(&self, o: &Self) -> bool {
        let x = [&self.a, &self.b, &self.c, &self.d];
        let y = [&o.a, &o.b, &o.c, &o.d];
        // x = lambda y for a rational lambda: all 2x2 minors of the pair vanish.
        for i in 0..4 {
            for j in 0..4 {
                if x[i] * y[j] != x[j] * y[i] {
                    return false;
                }
            }
        }
        true
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

impl fmt::Display for RationalMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
