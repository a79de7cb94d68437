//! Real quadratic fields and orders: fundamental units, the negative Pell
//! equation, conductors, stabilizer matrices and prime splitting.
//!
//! Units are kept as integer coordinates `(u, v)` over the integral basis
//! `{1, w}` with `w = sqrt(d)` or `w = (1 + sqrt(d))/2`. Following the
//! convention used throughout the crate, the *fundamental unit* `eps_plus`
//! is the generator `> 1` of the totally positive units, so a unit of norm
//! `-1` is squared, and `t0 = 2 log(eps_plus)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_square, isqrt, ln_big, squarefree_decompose};
use crate::cfe::{expand, word_matrix};
use crate::error::{Error, Result};
use crate::mat::RationalMat;
use crate::quad::QuadNum;
use crate::surd::Surd;

/// Default cap on the unit power searched by [`geodesic_data`].
pub const DEFAULT_UNIT_BUDGET: u64 = 10_000_000;

/// Element `u + v w` of the maximal order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unit {
    #[serde(serialize_with = "ser_big")]
    pub u: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub v: BigInt,
}

pub(crate) fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_pair<S: serde::Serializer>(
    x: &Option<(BigInt, BigInt)>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some((a, b)) => s.collect_seq([a.to_string(), b.to_string()]),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldData {
    #[serde(serialize_with = "ser_big")]
    pub d: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub disc: BigInt,
    /// Fundamental unit of the maximal order (any norm).
    pub eps: Unit,
    pub eps_norm: i8,
    /// Totally positive fundamental unit.
    pub eps_plus: Unit,
    pub t0: f64,
    /// Smallest positive solution of `x^2 - d y^2 = -1`, if any.
    #[serde(serialize_with = "ser_opt_pair")]
    pub neg_pell: Option<(BigInt, BigInt)>,
}

impl FieldData {
    fn half_basis(&self) -> bool {
        (&self.d % 4u32) == BigInt::one()
    }

    /// `(u1 + v1 w)(u2 + v2 w)`.
    pub fn mul(&self, x: &Unit, y: &Unit) -> Unit {
        let uu = &x.u * &y.u;
        let uv = &x.u * &y.v + &x.v * &y.u;
        let vv = &x.v * &y.v;
        if self.half_basis() {
            // w^2 = w + (d - 1)/4
            let c = (&self.d - 1) / 4;
            Unit { u: uu + &vv * c, v: uv + vv }
        } else {
            Unit { u: uu + vv * &self.d, v: uv }
        }
    }

    pub fn pow(&self, x: &Unit, k: u64) -> Unit {
        let mut acc = Unit { u: BigInt::one(), v: BigInt::zero() };
        let mut base = x.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `(X, Y)` with `x = (X + Y sqrt d)/2`.
    pub fn doubled_coords(&self, x: &Unit) -> (BigInt, BigInt) {
        if self.half_basis() {
            (BigInt::from(2) * &x.u + &x.v, x.v.clone())
        } else {
            (BigInt::from(2) * &x.u, BigInt::from(2) * &x.v)
        }
    }

    pub fn to_quad(&self, x: &Unit) -> QuadNum {
        let (xx, yy) = self.doubled_coords(x);
        let two = BigInt::from(2);
        QuadNum::new(
            BigRational::new(xx, two.clone()),
            BigRational::new(yy, two),
            self.d.clone(),
        )
    }

    /// Natural log of a unit `> 1`.
    pub fn ln_unit(&self, x: &Unit) -> f64 {
        let (xx, yy) = self.doubled_coords(x);
        // x = (X + Y sqrt d)/2 with X, Y > 0
        let a = ln_big(&xx);
        let b = ln_big(&(&yy * &yy * &self.d)) / 2.0;
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        hi + (lo - hi).exp().ln_1p() - std::f64::consts::LN_2
    }
}

/// Field data for `Q(sqrt d)` with `d > 1` square-free.
pub fn field_data(d: &BigInt) -> Result<FieldData> {
    if *d <= BigInt::one() {
        return Err(Error::InvalidField(format!("d = {d} must exceed 1")));
    }
    let (s, _) = squarefree_decompose(d);
    if !s.is_one() {
        return Err(Error::InvalidField(format!("d = {d} is not square-free")));
    }
    let half = (d % 4u32) == BigInt::one();
    let disc = if half { d.clone() } else { BigInt::from(4) * d };
    let omega = if half {
        Surd::new(BigInt::one(), d.clone(), BigInt::from(2))?
    } else {
        Surd::new(BigInt::zero(), d.clone(), BigInt::one())?
    };
    let cf = expand(&omega, usize::MAX)?;
    let (eps, norm) = period_unit(&cf, d, half)?;
    let mut fd = FieldData {
        d: d.clone(),
        disc,
        eps: eps.clone(),
        eps_norm: norm,
        eps_plus: eps.clone(),
        t0: 0.0,
        neg_pell: None,
    };
    if norm == -1 {
        fd.eps_plus = fd.mul(&eps, &eps);
        fd.neg_pell = Some(neg_pell_solution(&fd)?);
    }
    fd.t0 = 2.0 * fd.ln_unit(&fd.eps_plus);
    debug_assert_eq!(fd.to_quad(&fd.eps_plus).norm(), BigRational::one());
    Ok(fd)
}

/// Unit attached to the period of a quadratic irrational in the field:
/// for the reduced tail `y` with period matrix `[[A, B], [C, D]]` it is
/// `C y + D`, of norm `(-1)^period`.
fn period_unit(cf: &crate::cfe::PeriodicCF, d: &BigInt, half: bool) -> Result<(Unit, i8)> {
    let y = cf.tail();
    let m = word_matrix(&cf.period);
    let s2 = y.d() / d;
    let s = isqrt(&s2);
    debug_assert_eq!(&s * &s * d, *y.d());
    // C (P + s sqrt d)/Q + D = x + y' sqrt d
    let q = y.q();
    let x = BigRational::new(&m.c * y.p() + &m.d * q, q.clone());
    let yy = BigRational::new(&m.c * &s, q.clone());
    let norm = if cf.period.len() % 2 == 0 { 1 } else { -1 };
    let to_int = |r: BigRational| -> Result<BigInt> {
        if r.is_integer() {
            Ok(r.to_integer())
        } else {
            Err(Error::Invariant(format!("unit coordinate {r} is not integral")))
        }
    };
    let unit = if half {
        let v = to_int(&yy * BigRational::from_integer(2.into()))?;
        let u = to_int(x - yy)?;
        Unit { u, v }
    } else {
        Unit { u: to_int(x)?, v: to_int(yy)? }
    };
    Ok((unit, norm))
}

fn neg_pell_solution(fd: &FieldData) -> Result<(BigInt, BigInt)> {
    let mut k = 1;
    while k <= 5 {
        let e = fd.pow(&fd.eps, k);
        let (xx, yy) = fd.doubled_coords(&e);
        if xx.is_even() && yy.is_even() {
            let (x, y) = (xx / 2, yy / 2);
            if &x * &x - &fd.d * &y * &y != -BigInt::one() {
                return Err(Error::Invariant("negative Pell check failed".into()));
            }
            return Ok((x, y));
        }
        k += 2;
    }
    Err(Error::Invariant("no odd power of a norm -1 unit lies in Z[sqrt d]".into()))
}

/// Conductor `f` and discriminant `f^2 disc` of the multiplier ring of
/// `Z + Z alpha`.
pub fn order_of(alpha: &Surd) -> (BigInt, BigInt) {
    let (a, b, c) = alpha.min_poly();
    let order_disc = &b * &b - BigInt::from(4) * &a * &c;
    let (s, d) = squarefree_decompose(&order_disc);
    let disc = if (&d % 4u32) == BigInt::one() { d } else { BigInt::from(4) * d };
    let f2 = &order_disc / &disc;
    let f = isqrt(&f2);
    debug_assert!(is_square(&f2));
    let _ = s;
    (f, order_disc)
}

/// Closed-geodesic data attached to a quadratic irrational.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicData {
    pub alpha: Surd,
    #[serde(serialize_with = "ser_big")]
    pub d: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub conductor: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub order_disc: BigInt,
    /// Matrix of multiplication by `eps_plus` in the basis `(alpha, 1)`;
    /// rational in general.
    pub delta: RationalMat,
    /// Matrix of multiplication by `eps_plus^k` in the basis `(alpha, 1)`,
    /// the least power that is integral.
    pub gamma_alpha: RationalMat,
    pub k_alpha: u64,
    pub t0: f64,
    pub t_alpha: f64,
}

// Integer data for the multiplication matrix of x = (X + Y sqrt d)/2 on
// the basis (alpha, 1), alpha = (P + s sqrt d)/Q: entries are
// ((sX + YP), Y Q1, Y Q, (sX - YP)) / 2s.
struct MulMatrix {
    s: BigInt,
    p: BigInt,
    q: BigInt,
    q1: BigInt,
}

impl MulMatrix {
    fn new(alpha: &Surd, d: &BigInt) -> Self {
        let s = isqrt(&(alpha.d() / d));
        let q1 = (alpha.d() - alpha.p() * alpha.p()) / alpha.q();
        MulMatrix { s, p: alpha.p().clone(), q: alpha.q().clone(), q1 }
    }

    fn numerators(&self, x: &BigInt, y: &BigInt) -> [BigInt; 4] {
        [
            &self.s * x + y * &self.p,
            y * &self.q1,
            y * &self.q,
            &self.s * x - y * &self.p,
        ]
    }

    fn denom(&self) -> BigInt {
        BigInt::from(2) * &self.s
    }

    fn rational(&self, x: &BigInt, y: &BigInt) -> [BigRational; 4] {
        let den = self.denom();
        self.numerators(x, y).map(|n| BigRational::new(n, den.clone()))
    }
}

/// Stabilizer data of `alpha`: the least power `eps_plus^k` whose
/// multiplication matrix in the basis `(alpha, 1)` is integral.
pub fn geodesic_data(alpha: &Surd) -> Result<GeodesicData> {
    geodesic_data_with_budget(alpha, DEFAULT_UNIT_BUDGET)
}

pub fn geodesic_data_with_budget(alpha: &Surd, budget: u64) -> Result<GeodesicData> {
    let (_, d) = squarefree_decompose(alpha.d());
    let fd = field_data(&d)?;
    let (f, order_disc) = order_of(alpha);
    let mm = MulMatrix::new(alpha, &d);
    let modulus = mm.denom();

    // Walk eps_plus^k modulo the matrix denominator.
    let half = fd.half_basis();
    let reduce = |x: &Unit| Unit { u: x.u.mod_floor(&modulus), v: x.v.mod_floor(&modulus) };
    let step = reduce(&fd.eps_plus);
    let mut cur = step.clone();
    let mut k = 1u64;
    loop {
        let (xx, yy) = fd.doubled_coords(&cur);
        if mm.numerators(&xx, &yy).iter().all(|n| n.is_multiple_of(&modulus)) {
            break;
        }
        if k >= budget {
            return Err(Error::OrderBudgetExceeded(budget));
        }
        cur = reduce(&fd.mul(&cur, &step));
        k += 1;
    }
    let _ = half;

    let (x1, y1) = fd.doubled_coords(&fd.eps_plus);
    let delta = RationalMat::from_rationals(mm.rational(&x1, &y1))?;
    let unit = fd.pow(&fd.eps_plus, k);
    let (xk, yk) = fd.doubled_coords(&unit);
    let den = mm.denom();
    let [a, b, c, dd] = mm.numerators(&xk, &yk).map(|n| n / &den);
    let gamma = RationalMat::raw(a, b, c, dd);
    if gamma.det() != BigInt::one() {
        return Err(Error::Invariant(format!("stabilizer {gamma} does not have determinant 1")));
    }
    verify_stabilizer(alpha, &gamma, &fd.to_quad(&unit))?;
    let t_alpha = k as f64 * fd.t0;
    Ok(GeodesicData {
        alpha: alpha.clone(),
        d,
        conductor: f,
        order_disc,
        delta,
        gamma_alpha: gamma,
        k_alpha: k,
        t0: fd.t0,
        t_alpha,
    })
}

/// Checks `gamma (alpha, 1)^T = w (alpha, 1)^T` exactly; the conjugate
/// identity follows by applying the Galois automorphism.
fn verify_stabilizer(alpha: &Surd, gamma: &RationalMat, w: &QuadNum) -> Result<()> {
    let a = QuadNum::from_surd(alpha);
    let s = isqrt(&(alpha.d() / &w.rad));
    // rewrite w over sqrt(D) with D = s^2 d
    let w = QuadNum::new(
        w.a.clone(),
        &w.b / BigRational::from_integer(s),
        alpha.d().clone(),
    );
    let int = |x: &BigInt| QuadNum::from_rational(BigRational::from_integer(x.clone()), alpha.d().clone());
    let row1 = int(&gamma.a) * a.clone() + int(&gamma.b);
    let row2 = int(&gamma.c) * a.clone() + int(&gamma.d);
    if row1 != w.clone() * a || row2 != w {
        return Err(Error::Invariant(format!("{gamma} does not stabilize {alpha}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// Decomposition type of the prime `p` in `Q(sqrt d)`, via the Kronecker
/// symbol of the field discriminant.
pub fn split_type(d: &BigInt, p: u64) -> Result<SplitType> {
    let (_, sf) = squarefree_decompose(d);
    if sf <= BigInt::one() {
        return Err(Error::InvalidField(format!("d = {d} does not define a real quadratic field")));
    }
    if !crate::arith::is_probable_prime(&num_bigint::BigUint::from(p)) {
        return Err(Error::Config(format!("{p} is not prime")));
    }
    let disc = if (&sf % 4u32) == BigInt::one() { sf.clone() } else { BigInt::from(4) * &sf };
    let pb = BigInt::from(p);
    if (&disc % &pb).is_zero() {
        return Ok(SplitType::Ramified);
    }
    if p == 2 {
        let r = (&disc % 8u32).to_u32().unwrap_or(0);
        return Ok(if r == 1 { SplitType::Split } else { SplitType::Inert });
    }
    let e = disc.mod_floor(&pb).modpow(&BigInt::from((p - 1) / 2), &pb);
    Ok(if e.is_one() { SplitType::Split } else { SplitType::Inert })
}

/// True when some prime of `primes` splits in the field of `alpha`.
pub fn is_s_split(alpha: &Surd, primes: &[u64]) -> Result<bool> {
    for &p in primes {
        if split_type(alpha.d(), p)? == SplitType::Split {
            return Ok(true);
        }
    }
    Ok(false)
}
