//! Hecke spheres, height decompositions and branch membership, plus the
//! degenerate sequences built from the negative Pell equation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{dedekind_psi, is_squarefree};
use crate::cfe::expand;
use crate::error::{Error, Result};
use crate::field::{field_data, ser_big};
use crate::mat::RationalMat;
use crate::surd::Surd;

/// Hermite form `[[a, b], [0, e]]` with `a e = h`, `0 <= b < e` and
/// `gcd(a, b, e) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SphereRep {
    pub h: u64,
    pub a: u64,
    pub b: u64,
    pub e: u64,
}

impl SphereRep {
    pub fn mat(&self) -> RationalMat {
        RationalMat::new(self.a.into(), self.b.into(), BigInt::zero(), self.e.into())
            .expect("primitive Hermite form")
    }
}

/// The primitive index-`h` sublattices of `Z^2`, one Hermite form each.
pub fn sphere_reps(h: i64) -> Result<Vec<SphereRep>> {
    if h <= 0 {
        return Err(Error::InvalidRadius(h.to_string()));
    }
    let h = h as u64;
    let mut out = Vec::with_capacity(dedekind_psi(h) as usize);
    for a in 1..=h {
        if h % a != 0 {
            continue;
        }
        let e = h / a;
        for b in 0..e {
            if a.gcd(&b).gcd(&e) == 1 {
                out.push(SphereRep { h, a, b, e });
            }
        }
    }
    debug_assert_eq!(out.len() as u64, dedekind_psi(h));
    Ok(out)
}

type M4 = [BigInt; 4];

fn mul(x: &M4, y: &M4) -> M4 {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

fn ident() -> M4 {
    [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()]
}

/// Unimodular `[[x, y], [-b/g, a/g]]` sending `(a, b)^T` to `(g, 0)^T`.
fn row_reducer(a: &BigInt, b: &BigInt) -> M4 {
    if !a.is_zero() && (b % a).is_zero() {
        return [BigInt::one(), BigInt::zero(), -(b / a), BigInt::one()];
    }
    let eg = a.extended_gcd(b);
    let g = eg.gcd;
    [eg.x, eg.y, -(b / &g), a / &g]
}

/// Writes `g = u1 diag(h, 1) u2` with `u1, u2` in GL2(Z) and
/// `h = |det g|` of the primitive representative.
pub fn decompose(g: &RationalMat) -> (RationalMat, BigInt, RationalMat) {
    if g.b.is_zero() && g.c.is_zero() && g.d.is_one() && g.a.is_positive() {
        return (RationalMat::identity(), g.a.clone(), RationalMat::identity());
    }
    let mut m: M4 = g.entries().map(|x| x.clone());
    // L m R = diag(s1, s2)
    let mut l = ident();
    let mut r = ident();
    loop {
        if !m[2].is_zero() {
            let t = row_reducer(&m[0], &m[2]);
            m = mul(&t, &m);
            l = mul(&t, &l);
        }
        if !m[1].is_zero() {
            // column version: right-multiply by the transpose reducer
            let t = row_reducer(&m[0], &m[1]);
            let tt = [t[0].clone(), t[2].clone(), t[1].clone(), t[3].clone()];
            m = mul(&m, &tt);
            r = mul(&r, &tt);
        }
        if m[1].is_zero() && m[2].is_zero() {
            if m[0].is_zero() || (&m[3] % &m[0]).is_zero() {
                break;
            }
            // diag(s1, s2) with s1 not dividing s2: fold row 2 into row 1
            let t = [BigInt::one(), BigInt::one(), BigInt::zero(), BigInt::one()];
            m = mul(&t, &m);
            l = mul(&t, &l);
        }
    }
    // make both diagonal entries positive
    let sign = |x: &BigInt| if x.is_negative() { -BigInt::one() } else { BigInt::one() };
    let s = [sign(&m[0]), BigInt::zero(), BigInt::zero(), sign(&m[3])];
    m = mul(&s, &m);
    l = mul(&s, &l);
    debug_assert!(m[0].is_one());
    let h = m[3].clone();
    // g = L^-1 diag(1, h) R^-1 = (L^-1 J) diag(h, 1) (J R^-1)
    let inv = |x: &M4| -> M4 {
        let det = &x[0] * &x[3] - &x[1] * &x[2];
        let adj = [x[3].clone(), -&x[1], -&x[2], x[0].clone()];
        adj.map(|e| e * &det)
    };
    let j: M4 = [BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero()];
    let u1 = mul(&inv(&l), &j);
    let u2 = mul(&j, &inv(&r));
    let [a, b, c, d] = u1;
    let u1 = RationalMat::raw(a, b, c, d);
    let [a, b, c, d] = u2;
    let u2 = RationalMat::raw(a, b, c, d);
    (u1, h, u2)
}

/// Whether `g1` and `g2` lie on the same branch at depth `h`: the
/// right unimodular factors agree modulo `Gamma_0(h)`.
pub fn same_branch_at_depth(g1: &RationalMat, g2: &RationalMat, h: u64) -> Result<bool> {
    if h == 0 {
        return Err(Error::InvalidRadius("0".into()));
    }
    let (_, _, u) = decompose(g1);
    let (_, _, v) = decompose(g2);
    let ui = u.inverse_unimodular().ok_or_else(|| Error::Invariant("non-unimodular factor".into()))?;
    let w = v.mul_exact(&ui);
    Ok((&w.c % BigInt::from(h)).is_zero())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateTerm {
    pub j: usize,
    #[serde(serialize_with = "ser_big")]
    pub n: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub k: BigInt,
    pub alpha: Surd,
    pub period: Vec<u64>,
}

/// `eps^(2j-1) = k_j + n_j sqrt(d)` for the negative Pell unit `eps`,
/// `j = 1..=count`; `n_j sqrt(d)` has period `[2 k_j]`.
pub fn degenerate_sequence(d: u64, count: usize) -> Result<Vec<DegenerateTerm>> {
    let db = BigInt::from(d);
    if d < 2 || !is_squarefree(&db) {
        return Err(Error::InvalidField(format!("d = {d} must be square-free and > 1")));
    }
    let fd = field_data(&db)?;
    let (x, y) = fd.neg_pell.clone().ok_or(Error::NoNegativePell(d))?;
    let (x2, y2) = (&x * &x + &db * &y * &y, BigInt::from(2) * &x * &y);
    let (mut k, mut n) = (x, y);
    let mut out = Vec::with_capacity(count);
    for j in 1..=count {
        let alpha = Surd::new(k.clone(), &n * &n * &db, BigInt::one())?;
        let cf = expand(&Surd::new(BigInt::zero(), &n * &n * &db, BigInt::one())?, usize::MAX)?;
        let want = BigInt::from(2) * &k;
        if cf.period.len() != 1 || BigInt::from(cf.period[0]) != want {
            return Err(Error::Invariant(format!("period of {n} sqrt({d}) is not [{want}]")));
        }
        out.push(DegenerateTerm { j, n: n.clone(), k: k.clone(), alpha, period: cf.period.clone() });
        let nk = &k * &x2 + &db * &n * &y2;
        let nn = &k * &y2 + &n * &x2;
        k = nk;
        n = nn;
    }
    Ok(out)
}
