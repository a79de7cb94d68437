//! Continued-fraction expansion of quadratic irrationals with exact period
//! detection, pattern frequencies, cylinders and the Gauss-Kuzmin measure.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mat::RationalMat;
use crate::surd::Surd;

/// Eventually periodic expansion `[a0; preperiod, (period)]`.
///
/// The period is stored in its natural phase: it starts at the first
/// Gauss-map state that recurs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicCF {
    pub a0: BigInt,
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
    pub source: Surd,
    cycle_start: Surd,
}

#[derive(Serialize)]
struct CfJson<'a> {
    a0: serde_json::Value,
    pre: &'a [u64],
    per: &'a [u64],
}

impl Serialize for PeriodicCF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let a0 = match self.a0.to_i64() {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::from(self.a0.to_string()),
        };
        CfJson {
            a0,
            pre: &self.preperiod,
            per: &self.period,
        }
        .serialize(s)
    }
}

fn digit_u64(a: BigInt) -> Result<u64> {
    a.to_u64()
        .ok_or_else(|| Error::OutOfRange(format!("partial quotient {a} exceeds u64")))
}

/// Expands `s`, detecting the period by recording every Gauss-map state.
pub fn expand(s: &Surd, max_steps: usize) -> Result<PeriodicCF> {
    let a0 = s.floor();
    let mut x = s.add_int(&-&a0);
    let mut seen: HashMap<Surd, usize> = HashMap::new();
    let mut digits = Vec::new();
    loop {
        if let Some(&i) = seen.get(&x) {
            let period = digits.split_off(i);
            let cf = PeriodicCF {
                a0,
                preperiod: digits,
                period,
                source: s.clone(),
                cycle_start: x,
            };
            debug_assert_eq!(cf.reconstruct(), cf.source);
            return Ok(cf);
        }
        if digits.len() >= max_steps {
            return Err(Error::PeriodTooLong(max_steps));
        }
        let (a, next) = x.gauss_step_unchecked();
        seen.insert(x, digits.len());
        digits.push(digit_u64(a)?);
        x = next;
    }
}

/// Matrix `prod [[a, 1], [1, 0]]` of a digit word.
pub fn word_matrix(word: &[u64]) -> RationalMat {
    let (mut a, mut b, mut c, mut d) = (
        BigInt::one(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::one(),
    );
    for &w in word {
        let w = BigInt::from(w);
        // [[a,b],[c,d]] * [[w,1],[1,0]]
        let na = &a * &w + &b;
        let nc = &c * &w + &d;
        b = a;
        d = c;
        a = na;
        c = nc;
    }
    RationalMat::raw(a, b, c, d)
}

impl PeriodicCF {
    /// First state of the Gauss-map cycle, in (0, 1).
    pub fn cycle_start(&self) -> &Surd {
        &self.cycle_start
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// The purely periodic tail `[period[0]; period[1], ...]`, a reduced surd.
    pub fn tail(&self) -> Surd {
        self.cycle_start.recip()
    }

    /// Rebuilds the value from the digits alone: the tail is the attracting
    /// fixed point of the period matrix, prefixed by `a0` and the preperiod.
    pub fn reconstruct(&self) -> Surd {
        let m = word_matrix(&self.period);
        // c y^2 + (d - a) y - b = 0, larger root
        let amd = &m.a - &m.d;
        let disc = &amd * &amd + BigInt::from(4) * &m.b * &m.c;
        let tail = Surd::new(amd, disc, BigInt::from(2) * &m.c)
            .expect("period matrix has an irrational fixed point");
        let head = RationalMat::raw(self.a0.clone(), BigInt::one(), BigInt::one(), BigInt::zero());
        let pre = head.mul_exact(&word_matrix(&self.preperiod));
        tail.moebius(&pre)
    }

    /// Whether the period matrix fixes the tail.
    pub fn tail_is_fixed(&self) -> bool {
        let y = self.tail();
        y.moebius(&word_matrix(&self.period)) == y
    }

    /// The cycle `x_1, ..., x_l` of the Gauss map in (0, 1).
    pub fn period_points(&self) -> Vec<Surd> {
        let mut out = Vec::with_capacity(self.period.len());
        let mut x = self.cycle_start.clone();
        for _ in 0..self.period.len() {
            let (_, next) = x.gauss_step_unchecked();
            out.push(x);
            x = next;
        }
        debug_assert_eq!(x, self.cycle_start);
        out
    }

    /// Digits of the expansion after `a0`, starting with the preperiod.
    pub fn digits(&self) -> impl Iterator<Item = u64> + '_ {
        self.preperiod
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }
}

/// Number of cyclic occurrences of `w` in `period`.
pub fn cyclic_count(period: &[u64], w: &[u64]) -> usize {
    let l = period.len();
    (0..l)
        .filter(|&i| w.iter().enumerate().all(|(j, &x)| period[(i + j) % l] == x))
        .count()
}

fn check_word(w: &[u64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidPattern("empty word".into()));
    }
    if w.contains(&0) {
        return Err(Error::InvalidPattern("digits must be positive".into()));
    }
    Ok(())
}

/// Frequency of the pattern `w` along the period: the number of cyclic
/// occurrences divided by the period length.
pub fn pattern_freq(cf: &PeriodicCF, w: &[u64]) -> Result<BigRational> {
    check_word(w)?;
    let f = BigRational::new(
        cyclic_count(&cf.period, w).into(),
        cf.period.len().into(),
    );
    debug_assert_eq!(Ok(&f), pattern_freq_by_cylinder(cf, w).as_ref());
    Ok(f)
}

/// Fraction of period points lying in the cylinder of `w`.
pub fn pattern_freq_by_cylinder(cf: &PeriodicCF, w: &[u64]) -> Result<BigRational> {
    let cyl = cylinder(w)?;
    let inside = cf
        .period_points()
        .iter()
        .filter(|x| cyl.contains(x))
        .count();
    Ok(BigRational::new(inside.into(), cf.period.len().into()))
}

/// The interval of x in (0, 1) whose expansion starts with a word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cylinder {
    pub word: Vec<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub lo: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub hi: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub length: BigRational,
    pub gauss_mass: f64,
}

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Cylinder of `w`, with its Gauss-Kuzmin mass.
pub fn cylinder(w: &[u64]) -> Result<Cylinder> {
    check_word(w)?;
    // continuants of [0; w]
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for &a in w {
        let a = BigInt::from(a);
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
    let x = BigRational::new(p.clone(), q.clone());
    let y = BigRational::new(&p + &p_prev, &q + &q_prev);
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let length = BigRational::new(BigInt::one(), &q * (&q + &q_prev));
    debug_assert_eq!(&hi - &lo, length);
    let gauss_mass = gauss_measure(&lo, &hi);
    Ok(Cylinder {
        word: w.to_vec(),
        lo,
        hi,
        length,
        gauss_mass,
    })
}

impl Cylinder {
    pub fn contains(&self, x: &Surd) -> bool {
        use std::cmp::Ordering::*;
        x.cmp_rational(&self.lo) == Greater && x.cmp_rational(&self.hi) == Less
    }

    /// `(1 + hi) / (1 + lo)`, whose base-2 logarithm is the Gauss mass.
    pub fn mass_ratio(&self) -> BigRational {
        let one = BigRational::one();
        (&one + &self.hi) / (&one + &self.lo)
    }
}

/// Gauss-Kuzmin measure of `(lo, hi)`: `log2((1 + hi) / (1 + lo))`.
pub fn gauss_measure(lo: &BigRational, hi: &BigRational) -> f64 {
    let rel = (hi - lo) / (BigRational::one() + lo);
    ratio_to_f64(&rel).ln_1p() / std::f64::consts::LN_2
}

/// Gauss-Kuzmin distribution function `log2(1 + t)`.
pub fn gauss_cdf(t: f64) -> f64 {
    t.ln_1p() / std::f64::consts::LN_2
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    crate::hp::HpReal::from_ratio(r.numer(), r.denom(), 64).to_f64()
}

/// Kolmogorov distance between the counting measure on the period and the
/// Gauss-Kuzmin measure.
pub fn nu_discrepancy(cf: &PeriodicCF) -> f64 {
    let mut xs: Vec<f64> = cf
        .period_points()
        .iter()
        .map(|x| x.eval_hp(128).to_f64())
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let l = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let g = gauss_cdf(x);
            let below = i as f64 / l;
            let at = (i + 1) as f64 / l;
            (g - below).abs().max((at - g).abs())
        })
        .fold(0.0, f64::max)
}

/// Integral of `f` against the counting measure on the period.
pub fn nu_integrate<F: Fn(f64) -> f64>(cf: &PeriodicCF, f: F) -> f64 {
    let pts = cf.period_points();
    let n = pts.len() as f64;
    pts.iter().map(|x| f(x.eval_hp(128).to_f64())).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(p: i64, d: i64, q: i64) -> PeriodicCF {
        expand(&Surd::from_i64(p, d, q).unwrap(), 10_000).unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn small_expansions() {
        let c = cf(0, 2, 1);
        assert_eq!((c.a0.clone(), c.preperiod.clone(), c.period.clone()), (1.into(), vec![], vec![2]));
        let c = cf(0, 3, 1);
        assert_eq!(c.period, vec![1, 2]);
        let c = cf(0, 50, 1);
        assert_eq!((c.a0.clone(), c.period.clone()), (7.into(), vec![14]));
        let c = cf(1, 2, 3);
        assert_eq!(c.reconstruct(), c.source);
        assert!(c.tail_is_fixed());
    }

    #[test]
    fn preperiod_detected() {
        // (1 + sqrt 2)/3 = 0.8047... = [0; 1, 4, 8, 4, 1, 1, 2, 2, 1, 1, ...]
        let c = cf(1, 2, 3);
        assert!(!c.period.is_empty());
        assert_eq!(c.reconstruct(), c.source);
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["a0"], 0);
    }

    #[test]
    fn period_points_examples() {
        assert_eq!(cf(0, 2, 1).period_points(), vec![Surd::from_i64(-1, 2, 1).unwrap()]);
        assert_eq!(cf(1, 5, 2).period_points(), vec![Surd::from_i64(-1, 5, 2).unwrap()]);
        let pts = cf(0, 3, 1).period_points();
        assert_eq!(pts.len(), 2);
        assert!(pts.contains(&Surd::from_i64(-1, 3, 1).unwrap()));
        assert!(pts.contains(&Surd::from_i64(-1, 3, 2).unwrap()));
    }

    #[test]
    fn frequencies() {
        let phi = cf(1, 5, 2);
        assert_eq!(pattern_freq(&phi, &[1]).unwrap(), r(1, 1));
        assert_eq!(pattern_freq(&phi, &[2]).unwrap(), r(0, 1));
        assert_eq!(pattern_freq(&cf(0, 3, 1), &[1, 2]).unwrap(), r(1, 2));
        assert!(pattern_freq(&phi, &[]).is_err());
        assert!(pattern_freq(&phi, &[0]).is_err());
    }

    #[test]
    fn cylinders() {
        let c = cylinder(&[1]).unwrap();
        assert_eq!((c.lo.clone(), c.hi.clone(), c.length.clone()), (r(1, 2), r(1, 1), r(1, 2)));
        assert!((c.gauss_mass - 0.415037499278844).abs() < 1e-14);
        let c = cylinder(&[2]).unwrap();
        assert_eq!((c.lo.clone(), c.hi.clone(), c.length.clone()), (r(1, 3), r(1, 2), r(1, 6)));
        assert!((c.gauss_mass - 0.169925001442312).abs() < 1e-14);
        let c = cylinder(&[1, 1]).unwrap();
        assert_eq!((c.lo.clone(), c.hi.clone(), c.length.clone()), (r(1, 2), r(2, 3), r(1, 6)));
        assert_eq!(cylinder(&[]), Err(Error::InvalidPattern("empty word".into())));
    }

    #[test]
    fn discrepancy_of_atoms() {
        // single atom at x: sup of |F - G| is max(G(x), 1 - G(x))
        let phi = cf(1, 5, 2);
        let x = (5f64.sqrt() - 1.0) / 2.0;
        let g = gauss_cdf(x);
        assert!((nu_discrepancy(&phi) - g.max(1.0 - g)).abs() < 1e-12);
        assert!(nu_discrepancy(&cf(0, 50, 1)) > 0.9);
    }

    #[test]
    fn integration() {
        let phi = cf(1, 5, 2);
        assert!((nu_integrate(&phi, |_| 1.0) - 1.0).abs() < 1e-15);
        assert!((nu_integrate(&phi, |x| x) - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }
}
