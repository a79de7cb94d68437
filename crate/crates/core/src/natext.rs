//! The invertible extension `S̄(y, z) = (S(y), y (1 - y z))` of the Gauss map
//! on `D = {0 < y < 1, 0 < z < 1/(1 + y)}`, periods on its cross-section and
//! the constant `c0` relating period lengths to geodesic lengths.
//!
//! The orbit of a Gauss cycle point `y` lifts to the periodic point
//! `(y, 1/(y - y'))`, `y'` the Galois conjugate. A side tag flips at every
//! step, so the tagged orbit closes after `j |P|` steps with `j = 1` for
//! even periods and `j = 2` for odd ones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::arith::isqrt;
use crate::cfe::{expand, PeriodicCF};
use crate::error::{Error, Result};
use crate::field::{geodesic_data, GeodesicData};
use crate::par::{self, Execution};
use crate::quad::QuadNum;
use crate::surd::Surd;

/// A point of `D` with exact coordinates in `Q(sqrt D)` and a side tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatPoint {
    pub y: QuadNum,
    pub z: QuadNum,
    pub sign: i8,
}

fn floor_quad(x: &QuadNum) -> BigInt {
    // x = (A + B sqrt D)/C with C > 0
    let c = x.a.denom().lcm(x.b.denom());
    let a = x.a.numer() * (&c / x.a.denom());
    let b = x.b.numer() * (&c / x.b.denom());
    let t = isqrt(&(&b * &b * &x.rad));
    let top = if b.is_negative() { a - t - 1 } else { a + t };
    top.div_floor(&c)
}

fn rat_quad(r: BigRational, rad: &BigInt) -> QuadNum {
    QuadNum::from_rational(r, rad.clone())
}

impl NatPoint {
    pub fn new(y: QuadNum, z: QuadNum, sign: i8) -> Result<Self> {
        let pt = NatPoint { y, z, sign };
        if !pt.in_domain() {
            return Err(Error::OutOfDomain(format!("y = {}, z = {}", pt.y.to_f64(), pt.z.to_f64())));
        }
        Ok(pt)
    }

    pub fn in_domain(&self) -> bool {
        use std::cmp::Ordering::*;
        let one = rat_quad(BigRational::one(), &self.y.rad);
        self.y.signum() == Greater
            && self.y.cmp_value(&one) == Less
            && self.z.signum() == Greater
            && (self.z.clone() * (one.clone() + self.y.clone())).cmp_value(&one) == Less
    }

    /// The lift `(y, 1/(y - y'))` of a Gauss cycle point.
    pub fn periodic_lift(y: &Surd) -> Result<Self> {
        let yq = QuadNum::from_surd(y);
        let z = (yq.clone() - yq.conj()).recip();
        NatPoint::new(yq, z, 1)
    }
}

/// One step of `S̄`, flipping the side tag.
pub fn sbar(pt: &NatPoint) -> Result<NatPoint> {
    if !pt.in_domain() || pt.y.b.is_zero() {
        return Err(Error::OutOfDomain(format!("y = {}, z = {}", pt.y.to_f64(), pt.z.to_f64())));
    }
    let inv = pt.y.recip();
    let a = floor_quad(&inv);
    let y1 = inv - rat_quad(BigRational::from_integer(a), &pt.y.rad);
    let one = rat_quad(BigRational::one(), &pt.y.rad);
    let z1 = pt.y.clone() * (one - pt.y.clone() * pt.z.clone());
    let out = NatPoint { y: y1, z: z1, sign: -pt.sign };
    if !out.in_domain() {
        return Err(Error::Invariant("S-bar left the domain".into()));
    }
    Ok(out)
}

/// Floating-point `S̄` for Monte-Carlo work.
pub fn sbar_f64(y: f64, z: f64) -> (f64, f64) {
    let inv = 1.0 / y;
    (inv - inv.floor(), y * (1.0 - y * z))
}

/// `(pbar, j)`: the tagged orbit of the periodic lift closes after
/// `pbar = j |P|` steps.
pub fn natext_period(cf: &PeriodicCF) -> Result<(usize, u8)> {
    let l = cf.period_len();
    let j: u8 = if l % 2 == 0 { 1 } else { 2 };
    let start = NatPoint::periodic_lift(cf.cycle_start())?;
    let mut pt = sbar(&start)?;
    let mut steps = 1usize;
    while pt != start {
        if steps > 2 * l {
            return Err(Error::Invariant("tagged orbit did not close".into()));
        }
        pt = sbar(&pt)?;
        steps += 1;
    }
    if steps != j as usize * l {
        return Err(Error::Invariant(format!("tagged period {steps} differs from {j} * {l}")));
    }
    Ok((steps, j))
}

/// `t_alpha / (j |P|)`.
pub fn c_alpha(cf: &PeriodicCF, geo: &GeodesicData) -> f64 {
    let l = cf.period_len();
    let j = if l % 2 == 0 { 1.0 } else { 2.0 };
    geo.t_alpha / (j * l as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C0Row {
    pub d: u64,
    pub period_len: usize,
    pub j: u8,
    pub t_alpha: f64,
    pub c_alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C0Estimate {
    /// Period-weighted mean of `c_alpha`.
    pub estimate: f64,
    /// Weighted standard deviation divided by the estimate.
    pub spread: f64,
    pub rows: Vec<C0Row>,
}

pub fn c0_row(d: u64) -> Result<C0Row> {
    let alpha = Surd::new(BigInt::zero(), BigInt::from(d), BigInt::one())?;
    let cf = expand(&alpha, usize::MAX)?;
    let geo = geodesic_data(&alpha)?;
    let l = cf.period_len();
    Ok(C0Row {
        d,
        period_len: l,
        j: if l % 2 == 0 { 1 } else { 2 },
        t_alpha: geo.t_alpha,
        c_alpha: c_alpha(&cf, &geo),
    })
}

/// Estimates `c0` from `sqrt(d)`, `d` in `ds` non-square, keeping periods of
/// length at least `min_period`.
pub fn estimate_c0(ds: &[u64], min_period: usize, exec: Execution) -> Result<C0Estimate> {
    let cands: Vec<u64> = ds
        .iter()
        .copied()
        .filter(|&d| d >= 2 && !crate::arith::is_square(&BigInt::from(d)))
        .collect();
    let rows = par::map(exec, &cands, |&d| c0_row(d))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<C0Row> = rows.into_iter().filter(|r| r.period_len >= min_period).collect();
    if rows.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no sqrt(d) with period length >= {min_period}"
        )));
    }
    let w: f64 = rows.iter().map(|r| r.period_len as f64).sum();
    let mean = rows.iter().map(|r| r.period_len as f64 * r.c_alpha).sum::<f64>() / w;
    let var = rows
        .iter()
        .map(|r| r.period_len as f64 * (r.c_alpha - mean).powi(2))
        .sum::<f64>()
        / w;
    Ok(C0Estimate { estimate: mean, spread: var.sqrt() / mean, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub samples: u64,
    pub steps: u32,
    pub bins: usize,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Largest `|observed - expected| / sigma` over first-coordinate bins.
    pub marginal_max_z: f64,
}

impl McReport {
    pub fn marginal_ok(&self) -> bool {
        self.marginal_max_z <= 3.0
    }
}

/// Number of independent RNG streams; fixed so results do not depend on
/// the thread count.
pub const MC_SHARDS: usize = 64;

// Area of [y0, y1] x [z0, z1] below z = 1/(1 + y).
fn cell_area(y0: f64, y1: f64, z0: f64, z1: f64) -> f64 {
    // 1/(1+y) >= z1 for y <= 1/z1 - 1, and <= z0 for y >= 1/z0 - 1
    let ya = (1.0 / z1 - 1.0).clamp(y0, y1);
    let yb = if z0 > 0.0 { (1.0 / z0 - 1.0).clamp(y0, y1) } else { y1 };
    let full = (ya - y0) * (z1 - z0);
    let part = ((1.0 + yb) / (1.0 + ya)).ln() - z0 * (yb - ya);
    full + part
}

/// Pushes uniform samples on `D` forward `steps` times and compares the
/// joint histogram with the uniform law on `D` (chi-square, cells with
/// expected count below 5 pooled) and the first-coordinate histogram with
/// the Gauss-Kuzmin law.
pub fn lebesgue_mc_check(samples: u64, steps: u32, bins: usize, seed: u64, exec: Execution) -> Result<McReport> {
    if bins == 0 || samples == 0 {
        return Err(Error::Config("samples and bins must be positive".into()));
    }
    let per = samples / MC_SHARDS as u64;
    let extra = samples % MC_SHARDS as u64;
    let shards = par::map_range(exec, MC_SHARDS, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let n = per + u64::from((s as u64) < extra);
        let mut joint = vec![0u64; bins * bins];
        let mut taken = 0;
        while taken < n {
            let y: f64 = rng.random();
            let z: f64 = rng.random();
            if y <= 0.0 || z <= 0.0 || z * (1.0 + y) >= 1.0 {
                continue;
            }
            let (mut y, mut z) = (y, z);
            for _ in 0..steps {
                (y, z) = sbar_f64(y, z);
            }
            let iy = ((y * bins as f64) as usize).min(bins - 1);
            let iz = ((z * bins as f64) as usize).min(bins - 1);
            joint[iy * bins + iz] += 1;
            taken += 1;
        }
        joint
    });
    let mut joint = vec![0u64; bins * bins];
    for sh in shards {
        for (a, b) in joint.iter_mut().zip(sh) {
            *a += b;
        }
    }
    let total = samples as f64;
    let w = 1.0 / bins as f64;
    let area_d = std::f64::consts::LN_2;
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(bins * bins);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for iy in 0..bins {
        for iz in 0..bins {
            let e = total * cell_area(iy as f64 * w, (iy + 1) as f64 * w, iz as f64 * w, (iz + 1) as f64 * w) / area_d;
            let o = joint[iy * bins + iz] as f64;
            if e < 5.0 {
                pool_o += o;
                pool_e += e;
            } else {
                cells.push((o, e));
            }
        }
    }
    if pool_e > 0.0 || pool_o > 0.0 {
        if pool_e >= 5.0 || cells.is_empty() {
            cells.push((pool_o, pool_e));
        } else {
            // too small on its own: merge into the smallest regular cell
            let i = (0..cells.len())
                .min_by(|&a, &b| cells[a].1.total_cmp(&cells[b].1))
                .expect("nonempty");
            cells[i].0 += pool_o;
            cells[i].1 += pool_e;
        }
    }
    let groups = cells.len();
    let chi2: f64 = cells.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let dof = groups.saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Invariant(e.to_string()))?;
    let p_value = 1.0 - dist.cdf(chi2);

    let mut zmax: f64 = 0.0;
    for iy in 0..bins {
        let o: u64 = joint[iy * bins..(iy + 1) * bins].iter().sum();
        let (a, b) = (iy as f64 * w, (iy + 1) as f64 * w);
        let p = ((1.0 + b) / (1.0 + a)).ln() / area_d;
        let sigma = (total * p * (1.0 - p)).sqrt();
        zmax = zmax.max((o as f64 - total * p).abs() / sigma);
    }
    Ok(McReport { samples, steps, bins, chi2, dof, p_value, marginal_max_z: zmax })
}
