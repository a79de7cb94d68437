//! 2x2 matrices modulo `p^m` and the order function `k_{p^n}`.
//!
//! `K_{p,n}` is the conjugate `diag(1, p^n) K_p diag(1, p^-n)` of the
//! maximal compact `K_p = PGL2(Z_p)`, i.e. matrices `[[a, p^-n b], [p^n c, d]]`
//! with `a, b, c, d` p-integral and unit determinant. Every membership test
//! is projective: scalars are removed by stripping p-content.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{factor, factor_u64, is_probable_prime, lcm_u64, valuation};
use crate::error::{Error, Result};
use crate::mat::RationalMat;
use crate::par::{self, Execution};

/// Extra p-adic digits carried beyond what a membership test needs.
pub const GUARD_DIGITS: u32 = 4;
/// Default cap on the number of matrix powers any search may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const MAX_MODULUS: u64 = 1 << 62;

fn modulus(p: u64, m: u32) -> Result<u64> {
    let mut r: u64 = 1;
    for _ in 0..m {
        r = r
            .checked_mul(p)
            .filter(|&x| x <= MAX_MODULUS)
            .ok_or_else(|| Error::PrecisionError(format!("{p}^{m} exceeds the 62-bit working modulus")))?;
    }
    Ok(r)
}

fn val_mod(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut y = x;
    while y % p == 0 && v < cap {
        y /= p;
        v += 1;
    }
    v
}

/// `p^val * M` with `M` content-free and known modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicMat {
    pub p: u64,
    pub prec: u32,
    pub val: i64,
    pub entries: [u64; 4],
    #[serde(skip)]
    modulus: u64,
}

impl PadicMat {
    /// Strips the p-content of an integer matrix into `val` and reduces
    /// modulo `p^m`.
    pub fn from_ints(p: u64, m: u32, e: [&BigInt; 4]) -> Result<Self> {
        if m == 0 {
            return Err(Error::PrecisionError("precision must be at least 1".into()));
        }
        let v = e
            .iter()
            .filter_map(|x| valuation(x, p))
            .min()
            .ok_or_else(|| Error::InvalidMatrix("zero matrix".into()))?;
        let modu = modulus(p, m)?;
        let pv = BigInt::from(p).pow(v);
        let big_m = BigInt::from(modu);
        let r = |x: &BigInt| (x / &pv).mod_floor(&big_m).to_u64().expect("reduced entry");
        Ok(PadicMat {
            p,
            prec: m,
            val: v as i64,
            entries: [r(e[0]), r(e[1]), r(e[2]), r(e[3])],
            modulus: modu,
        })
    }

    pub fn identity(p: u64, m: u32) -> Result<Self> {
        let modu = modulus(p, m)?;
        Ok(PadicMat { p, prec: m, val: 0, entries: [1, 0, 0, 1], modulus: modu })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Product; precision drops by the content removed.
    pub fn mul(&self, o: &PadicMat) -> Result<PadicMat> {
        debug_assert_eq!(self.p, o.p);
        let m = self.prec.min(o.prec);
        let modu = if m == self.prec { self.modulus } else { o.modulus };
        let md = modu as u128;
        let [a, b, c, d] = self.entries.map(|x| x as u128 % md);
        let [e, f, g, h] = o.entries.map(|x| x as u128 % md);
        let prod = [
            ((a * e) % md + (b * g) % md) % md,
            ((a * f) % md + (b * h) % md) % md,
            ((c * e) % md + (d * g) % md) % md,
            ((c * f) % md + (d * h) % md) % md,
        ]
        .map(|x| x as u64);
        let cnt = prod.iter().map(|&x| val_mod(x, self.p, m)).min().unwrap_or(m);
        if cnt >= m {
            return Err(Error::PrecisionError(format!(
                "product vanishes modulo {}^{m}",
                self.p
            )));
        }
        let pc = self.p.pow(cnt);
        let new_prec = m - cnt;
        let new_mod = modu / pc;
        Ok(PadicMat {
            p: self.p,
            prec: new_prec,
            val: self.val + o.val + cnt as i64,
            entries: prod.map(|x| (x / pc) % new_mod),
            modulus: new_mod,
        })
    }

    pub fn pow(&self, k: u64) -> Result<PadicMat> {
        let mut acc = PadicMat::identity(self.p, self.prec)?;
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Reduction to a lower precision.
    pub fn truncate(&self, m: u32) -> Result<PadicMat> {
        let m = m.min(self.prec);
        let modu = modulus(self.p, m)?;
        Ok(PadicMat {
            p: self.p,
            prec: m,
            val: self.val,
            entries: self.entries.map(|x| x % modu),
            modulus: modu,
        })
    }

    fn det_mod(&self) -> u64 {
        let md = self.modulus as u128;
        let [a, b, c, d] = self.entries.map(|x| x as u128);
        let ad = a * d % md;
        let bc = b * c % md;
        ((ad + md - bc) % md) as u64
    }

    /// Valuation of the determinant, or `None` when it vanishes to full
    /// precision.
    pub fn det_valuation(&self) -> Option<u32> {
        let v = val_mod(self.det_mod(), self.p, self.prec);
        (v < self.prec).then_some(v)
    }

    pub fn is_scalar(&self) -> bool {
        let [a, b, c, d] = self.entries;
        b == 0 && c == 0 && a == d
    }

    pub fn lower_left_valuation(&self) -> u32 {
        val_mod(self.entries[2], self.p, self.prec)
    }

    /// Projective membership in `K_{p,n}`.
    pub fn in_kpn(&self, n: u32) -> Result<bool> {
        let vdet = self
            .det_valuation()
            .ok_or_else(|| Error::PrecisionError("determinant vanishes to working precision".into()))?;
        if vdet % 2 == 1 {
            return Ok(false);
        }
        // content of [[a p^n, b p^2n], [c, d p^n]] must equal n + vdet/2
        let target = n + vdet / 2;
        let shifts = [n, 2 * n, 0, n];
        let mut exact_min = u32::MAX;
        let mut bound_min = u32::MAX;
        for (x, s) in self.entries.iter().zip(shifts) {
            let v = val_mod(*x, self.p, self.prec);
            if v < self.prec {
                exact_min = exact_min.min(v + s);
            } else {
                bound_min = bound_min.min(self.prec + s);
            }
        }
        let undecided = || {
            Err(Error::PrecisionError(format!(
                "membership in K_({},{n}) undecided at precision {}",
                self.p, self.prec
            )))
        };
        if exact_min < target {
            Ok(false)
        } else if bound_min < target {
            undecided()
        } else if exact_min == target {
            Ok(true)
        } else if bound_min == target {
            undecided()
        } else {
            Ok(false)
        }
    }
}

pub fn pmat_from_rational(m: &RationalMat, p: u64, prec: u32) -> Result<PadicMat> {
    PadicMat::from_ints(p, prec, m.entries())
}

pub fn pmat_pow(a: &PadicMat, k: u64) -> Result<PadicMat> {
    a.pow(k)
}

pub fn in_kpn(a: &PadicMat, n: u32) -> Result<bool> {
    a.in_kpn(n)
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 || !is_probable_prime(&BigUint::from(p)) {
        return Err(Error::Config(format!("{p} is not prime")));
    }
    Ok(())
}

fn strip_p(e: [BigInt; 4], p: u64) -> [BigInt; 4] {
    let v = e.iter().filter_map(|x| valuation(x, p)).min().unwrap_or(0);
    let pv = BigInt::from(p).pow(v);
    e.map(|x| x / &pv)
}

fn mul4(x: &[BigInt; 4], y: &[BigInt; 4]) -> [BigInt; 4] {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

fn det4(x: &[BigInt; 4]) -> BigInt {
    &x[0] * &x[3] - &x[1] * &x[2]
}

/// Exact projective membership of an integer matrix in `K_{p,n}`.
fn exact_in_kpn(x: &[BigInt; 4], p: u64, n: u32) -> bool {
    let vdet = match valuation(&det4(x), p) {
        Some(v) => v,
        None => return false,
    };
    if vdet % 2 == 1 {
        return false;
    }
    let shifts = [n, 2 * n, 0, n];
    let e = x
        .iter()
        .zip(shifts)
        .filter_map(|(y, s)| valuation(y, p).map(|v| v + s))
        .min()
        .unwrap_or(0);
    e == n + vdet / 2
}

/// Necessary condition for a bounded projective orbit: both eigenvalues
/// have the same valuation, i.e. `v(tr^2) >= v(det)`.
pub fn is_compact_type(delta: &RationalMat, p: u64) -> bool {
    let tr = &delta.a + &delta.d;
    let vd = valuation(&delta.det(), p).unwrap_or(0);
    match valuation(&tr, p) {
        None => true,
        Some(vt) => 2 * vt >= vd,
    }
}

/// Minimal `k >= 1` with `delta^k` in `K_{p,n}`.
///
/// The exponents `k` with `delta^k` in `K_{p,n}` form a subgroup `L Z`.
/// A multiple of `L` is built from the first power `U = delta^k1` lying in
/// `K_p` and the projective order of `U` modulo `p^2`, then reduced prime by
/// prime while membership persists.
pub fn k_order(delta: &RationalMat, p: u64, n: u32, budget: u64) -> Result<u64> {
    check_prime(p)?;
    if !is_compact_type(delta, p) {
        return Err(Error::NotCompactType(p));
    }
    let m: [BigInt; 4] = delta.entries().map(|x| x.clone());

    // exact probe for k1; keeps stripped powers delta^r, r < k1
    let mut stripped = vec![strip_p([1.into(), 0.into(), 0.into(), 1.into()], p)];
    let mut cur = strip_p(m.clone(), p);
    let mut k1 = 1u64;
    while !exact_in_kpn(&cur, p, 0) {
        if k1 >= budget {
            return Err(Error::OrderBudgetExceeded(budget));
        }
        stripped.push(cur.clone());
        cur = strip_p(mul4(&cur, &m), p);
        k1 += 1;
    }
    let vmax = stripped
        .iter()
        .map(|s| valuation(&det4(s), p).unwrap_or(0))
        .max()
        .unwrap_or(0);
    let prec = 2 * n + vmax + GUARD_DIGITS + 2;
    let u = PadicMat::from_ints(p, prec, [&cur[0], &cur[1], &cur[2], &cur[3]])?;
    let rests = stripped
        .iter()
        .map(|s| PadicMat::from_ints(p, prec, [&s[0], &s[1], &s[2], &s[3]]))
        .collect::<Result<Vec<_>>>()?;
    let power = |k: u64| -> Result<PadicMat> {
        let (q, r) = (k / k1, (k % k1) as usize);
        u.pow(q)?.mul(&rests[r])
    };
    let member = |k: u64| -> Result<bool> { power(k)?.in_kpn(n) };

    // projective order of U modulo p^2
    let u2 = u.truncate(2)?;
    let mut w = u2.clone();
    let mut ord = 1u64;
    while !w.is_scalar() {
        if ord >= budget {
            return Err(Error::OrderBudgetExceeded(budget));
        }
        w = w.mul(&u2)?;
        ord += 1;
    }
    let k0 = k1
        .checked_mul(ord)
        .ok_or(Error::OrderBudgetExceeded(budget))?;
    let n0 = power(k0)?.lower_left_valuation();
    let mut cand = k0;
    for _ in n0.min(n)..n {
        cand = cand.checked_mul(p).ok_or(Error::OrderBudgetExceeded(budget))?;
    }
    let mut bumps = 0;
    while !member(cand)? {
        bumps += 1;
        if bumps > 2 * n + 2 {
            return Err(Error::Invariant(format!("no multiple of {k0} reaches K_({p},{n})")));
        }
        cand = cand.checked_mul(p).ok_or(Error::OrderBudgetExceeded(budget))?;
    }
    for (r, _) in factor_u64(cand) {
        while cand % r == 0 && member(cand / r)? {
            cand /= r;
        }
    }
    Ok(cand)
}

/// Brute-force `k_{p^n}` for every `n <= n_max` by scanning consecutive
/// powers.
pub fn k_order_oracle_upto(delta: &RationalMat, p: u64, n_max: u32, budget: u64) -> Result<Vec<u64>> {
    check_prime(p)?;
    let vd = valuation(&delta.det(), p).unwrap_or(0);
    if vd == 0 {
        // determinant is a unit: products never lose precision
        let prec = 2 * n_max + GUARD_DIGITS;
        let mp = pmat_from_rational(delta, p, prec)?;
        return scan(budget, n_max, mp.clone(), |a| a.mul(&mp), |a, n| a.in_kpn(n));
    }
    let m: [BigInt; 4] = delta.entries().map(|x| x.clone());
    scan(
        budget,
        n_max,
        strip_p(m.clone(), p),
        |a| Ok(strip_p(mul4(a, &m), p)),
        |a, n| Ok(exact_in_kpn(a, p, n)),
    )
}

fn scan<T>(
    budget: u64,
    n_max: u32,
    start: T,
    step: impl Fn(&T) -> Result<T>,
    test: impl Fn(&T, u32) -> Result<bool>,
) -> Result<Vec<u64>> {
    let mut found = vec![0u64; n_max as usize + 1];
    let mut left = found.len();
    let mut cur = start;
    let mut k = 1u64;
    loop {
        for n in 0..=n_max {
            if found[n as usize] == 0 && test(&cur, n)? {
                found[n as usize] = k;
                left -= 1;
            }
        }
        if left == 0 {
            return Ok(found);
        }
        if k >= budget {
            return Err(Error::OrderBudgetExceeded(budget));
        }
        cur = step(&cur)?;
        k += 1;
    }
}

pub fn k_order_oracle(delta: &RationalMat, p: u64, n: u32, budget: u64) -> Result<u64> {
    Ok(k_order_oracle_upto(delta, p, n, budget)?[n as usize])
}

/// Primes at which `delta` is not p-integral with unit determinant, i.e.
/// the primes of the determinant of its primitive representative.
pub fn denominator_primes(delta: &RationalMat) -> Vec<u64> {
    let det = delta.det().abs();
    factor(&det.to_biguint().expect("nonzero determinant"))
        .into_iter()
        .map(|(q, _)| q.to_u64().expect("small prime factor"))
        .collect()
}

/// `lcm` of the local orders at the primes of `h` (conjugated by the swap
/// at primes listed in `swapped`) and of the `K_p` orders at `s_extra`.
pub fn k_order_multi(
    delta: &RationalMat,
    h: u64,
    s_extra: &[u64],
    swapped: &[u64],
    budget: u64,
) -> Result<u64> {
    if h == 0 {
        return Err(Error::InvalidRadius("0".into()));
    }
    let swap = RationalMat::swap();
    let mut k = 1u64;
    let hf = factor_u64(h);
    for &(p, e) in &hf {
        let d = if swapped.contains(&p) { swap.mul(delta).mul(&swap) } else { delta.clone() };
        k = lcm_u64(k, k_order(&d, p, e, budget)?);
    }
    for &p in s_extra {
        if hf.iter().any(|&(q, _)| q == p) {
            continue;
        }
        k = lcm_u64(k, k_order(delta, p, 0, budget)?);
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: u32,
    pub k: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: BigRational,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ERatioTrace {
    pub p: u64,
    pub rows: Vec<TraceRow>,
    /// Least `n` from which the ratio is constant up to `n_max`.
    pub stable_from: u32,
}

/// `k_{p^n}(delta) / p^n` for `n = 0..=n_max`.
pub fn e_ratio_trace(
    delta: &RationalMat,
    p: u64,
    n_max: u32,
    budget: u64,
    exec: Execution,
) -> Result<ERatioTrace> {
    let ks = par::map_range(exec, n_max as usize + 1, |n| k_order(delta, p, n as u32, budget));
    let mut rows = Vec::with_capacity(ks.len());
    for (n, k) in ks.into_iter().enumerate() {
        let k = k?;
        let ratio = BigRational::new(BigInt::from(k), BigInt::from(p).pow(n as u32));
        rows.push(TraceRow { n: n as u32, k, ratio });
    }
    let last = rows.last().map(|r| r.ratio.clone()).unwrap_or_else(BigRational::one);
    let stable_from = rows
        .iter()
        .rev()
        .take_while(|r| r.ratio == last)
        .last()
        .map(|r| r.n)
        .unwrap_or(0);
    Ok(ERatioTrace { p, rows, stable_from })
}

/// Height of a nonzero rational: `prod p^|e|`.
pub fn rational_height(q: &BigRational) -> BigInt {
    (q.numer() * q.denom()).abs()
}

/// Whether `v_p(q) < 0`.
pub fn negative_at(q: &BigRational, p: u64) -> bool {
    !q.is_zero() && valuation(q.denom(), p).unwrap_or(0) > 0
}
