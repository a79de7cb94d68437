//! Experiment driver: frequency and period sweeps along `k^n alpha`, the
//! exact cross-check between p-adic orders and unit indices, and tabular
//! output.

pub mod config;
pub mod table;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::factor_u64;
use crate::cfe::{cylinder, expand, pattern_freq, ratio_to_f64, PeriodicCF};
use crate::error::{Error, Result};
use crate::field::geodesic_data_with_budget;
use crate::mat::RationalMat;
use crate::padic::{denominator_primes, k_order_multi, negative_at, rational_height, ERatioTrace};
use crate::par;
use crate::surd::Surd;

pub use config::SweepConfig;
pub use table::{emit, real, Table};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    #[serde(serialize_with = "crate::field::ser_big")]
    pub h: BigInt,
    pub period_len: Option<usize>,
    pub truncated: bool,
    pub freqs: Vec<f64>,
    pub masses: Vec<f64>,
    pub errors: Vec<f64>,
    pub ratio: Option<f64>,
    pub j: Option<u8>,
    pub t_alpha: Option<f64>,
    pub k_pred: Option<u64>,
    pub k_actual: Option<u64>,
}

impl SweepRow {
    fn empty(n: u32, h: BigInt) -> Self {
        SweepRow {
            n,
            h,
            period_len: None,
            truncated: false,
            freqs: Vec::new(),
            masses: Vec::new(),
            errors: Vec::new(),
            ratio: None,
            j: None,
            t_alpha: None,
            k_pred: None,
            k_actual: None,
        }
    }

    pub fn max_error(&self) -> Option<f64> {
        self.errors.iter().copied().reduce(f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySummary {
    pub first_triple_max: f64,
    pub last_triple_max: f64,
    /// Least-squares slope of `log(max error)` against `log(h)`.
    pub slope: f64,
    /// `-delta0_ref / 12`, for comparison only.
    pub reference_slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreqSweep {
    pub rows: Vec<SweepRow>,
    pub summary: Option<DecaySummary>,
}

fn multiplier(k: u64, n: u32) -> BigInt {
    BigInt::from(k).pow(n)
}

/// `k^n alpha`.
pub fn scaled(alpha: &Surd, k: u64, n: u32) -> Surd {
    let m = RationalMat::diag(multiplier(k, n), BigInt::one()).expect("nonzero");
    alpha.moebius(&m)
}

fn expand_row(cfg: &SweepConfig, n: u32) -> (SweepRow, Option<PeriodicCF>) {
    let mut row = SweepRow::empty(n, multiplier(cfg.k, n));
    match expand(&scaled(&cfg.alpha, cfg.k, n), cfg.max_steps) {
        Ok(cf) => {
            row.period_len = Some(cf.period_len());
            (row, Some(cf))
        }
        Err(_) => {
            row.truncated = true;
            (row, None)
        }
    }
}

/// Pattern frequencies on the period of `k^n alpha` against Gauss-Kuzmin
/// cylinder masses.
pub fn freq_sweep(cfg: &SweepConfig) -> Result<FreqSweep> {
    cfg.validate()?;
    let masses = cfg
        .patterns
        .iter()
        .map(|w| cylinder(w).map(|c| c.gauss_mass))
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<u32> = (cfg.n_min..=cfg.n_max).collect();
    let rows = par::map(cfg.exec, &ns, |&n| -> Result<SweepRow> {
        let (mut row, cf) = expand_row(cfg, n);
        if let Some(cf) = cf {
            for (w, &m) in cfg.patterns.iter().zip(&masses) {
                let f = ratio_to_f64(&pattern_freq(&cf, w)?);
                row.freqs.push(f);
                row.masses.push(m);
                row.errors.push((f - m).abs());
            }
        }
        Ok(row)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let summary = decay_summary(&rows, ratio_to_f64(&cfg.delta0_ref));
    Ok(FreqSweep { rows, summary })
}

fn decay_summary(rows: &[SweepRow], delta0: f64) -> Option<DecaySummary> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.max_error().map(|e| (crate::arith::ln_big(&r.h), e)))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let max3 = |s: &[(f64, f64)]| s.iter().map(|p| p.1).fold(0.0, f64::max);
    let fit: Vec<(f64, f64)> = pts.iter().filter(|p| p.1 > 0.0).map(|&(x, e)| (x, e.ln())).collect();
    let slope = if fit.len() >= 2 {
        let n = fit.len() as f64;
        let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
        let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 { sxy / sxx } else { f64::NAN }
    } else {
        f64::NAN
    };
    Some(DecaySummary {
        first_triple_max: max3(&pts[..3]),
        last_triple_max: max3(&pts[pts.len() - 3..]),
        slope,
        reference_slope: -delta0 / 12.0,
    })
}

/// Period lengths of `k^n alpha` with the exact unit index from both the
/// field side and the p-adic side.
pub fn period_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let ns: Vec<u32> = (cfg.n_min..=cfg.n_max).collect();
    par::map(cfg.exec, &ns, |&n| -> Result<SweepRow> {
        let (mut row, cf) = expand_row(cfg, n);
        if let Some(cf) = &cf {
            let l = cf.period_len();
            row.ratio = Some(l as f64 / ratio_to_f64(&BigRational::from_integer(row.h.clone())));
            row.j = Some(if l % 2 == 0 { 1 } else { 2 });
        }
        let q = BigRational::from_integer(row.h.clone());
        let cc = growth_crosscheck(&cfg.alpha, &q, cfg.budget)?;
        row.k_pred = Some(cc.k_pred);
        row.k_actual = Some(cc.k_actual);
        row.t_alpha = Some(cc.t_q_alpha);
        Ok(row)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crosscheck {
    pub q: String,
    pub h: u64,
    pub k_pred: u64,
    pub k_actual: u64,
    pub equal: bool,
    pub t_q_alpha: f64,
}

/// Compares the p-adic prediction for the unit index of `q alpha` with the
/// index found from its stabilizer.
///
/// `k_pred` is the least `k` with `D delta^k D^-1` integral, `D = diag(q, 1)`,
/// assembled prime by prime from `k_{p^n}`; `k_actual` is the least power of
/// the totally positive fundamental unit stabilizing `Z qalpha + Z`.
pub fn growth_crosscheck(alpha: &Surd, q: &BigRational, budget: u64) -> Result<Crosscheck> {
    if q.numer().is_zero() {
        return Err(Error::Config("q must be nonzero".into()));
    }
    let geo = geodesic_data_with_budget(alpha, budget)?;
    let h = rational_height(q)
        .to_u64()
        .ok_or_else(|| Error::OutOfRange(format!("height of {q} exceeds u64")))?;
    let swapped: Vec<u64> = factor_u64(h)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| negative_at(q, p))
        .collect();
    let s_extra = denominator_primes(&geo.delta);
    let k_pred = k_order_multi(&geo.delta, h, &s_extra, &swapped, budget)?;
    let qa = alpha.moebius(&RationalMat::scaling(q)?);
    let qgeo = geodesic_data_with_budget(&qa, budget)?;
    Ok(Crosscheck {
        q: q.to_string(),
        h,
        k_pred,
        k_actual: qgeo.k_alpha,
        equal: k_pred == qgeo.k_alpha,
        t_q_alpha: qgeo.t_alpha,
    })
}

fn word_label(w: &[u64]) -> String {
    w.iter().map(u64::to_string).collect::<Vec<_>>().join("_")
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn freq_table(sweep: &FreqSweep, patterns: &[Vec<u64>], digits: usize) -> Table {
    let mut header = vec!["n".to_string(), "h".into(), "period_len".into(), "truncated".into()];
    for w in patterns {
        let l = word_label(w);
        header.push(format!("freq_{l}"));
        header.push(format!("nu_{l}"));
        header.push(format!("err_{l}"));
    }
    let mut t = Table::new(header);
    for r in &sweep.rows {
        let mut row = vec![r.n.to_string(), r.h.to_string(), opt(&r.period_len), r.truncated.to_string()];
        for i in 0..patterns.len() {
            for v in [&r.freqs, &r.masses, &r.errors] {
                row.push(v.get(i).map(|x| real(*x, digits)).unwrap_or_default());
            }
        }
        t.push(row);
    }
    t
}

pub fn period_table(rows: &[SweepRow], digits: usize) -> Table {
    let mut t = Table::new(["n", "h", "period_len", "ratio", "j", "t_alpha", "k_pred", "k_actual"]);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.h.to_string(),
            opt(&r.period_len),
            r.ratio.map(|x| real(x, digits)).unwrap_or_default(),
            opt(&r.j),
            r.t_alpha.map(|x| real(x, digits)).unwrap_or_default(),
            opt(&r.k_pred),
            opt(&r.k_actual),
        ]);
    }
    t
}

pub fn crosscheck_table(rows: &[Crosscheck]) -> Table {
    let mut t = Table::new(["q", "h", "k_pred", "k_actual", "equal"]);
    for r in rows {
        t.push(vec![r.q.clone(), r.h.to_string(), r.k_pred.to_string(), r.k_actual.to_string(), r.equal.to_string()]);
    }
    t
}

pub fn trace_table(tr: &ERatioTrace) -> Table {
    let mut t = Table::new(["p", "n", "k", "k_over_pn_num", "k_over_pn_den"]);
    for r in &tr.rows {
        t.push(vec![
            tr.p.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.ratio.numer().to_string(),
            r.ratio.denom().to_string(),
        ]);
    }
    t
}

pub fn c0_table(rows: &[crate::natext::C0Row], digits: usize) -> Table {
    let mut t = Table::new(["d", "period_len", "j", "t_alpha", "c_alpha"]);
    for r in rows {
        t.push(vec![
            r.d.to_string(),
            r.period_len.to_string(),
            r.j.to_string(),
            real(r.t_alpha, digits),
            real(r.c_alpha, digits),
        ]);
    }
    t
}

pub fn sphere_table(reps: &[crate::hecke::SphereRep]) -> Table {
    let mut t = Table::new(["h", "a", "b", "e"]);
    for r in reps {
        t.push(vec![r.h.to_string(), r.a.to_string(), r.b.to_string(), r.e.to_string()]);
    }
    t
}

pub fn degenerate_table(terms: &[crate::hecke::DegenerateTerm]) -> Table {
    let mut t = Table::new(["j", "n_j", "k_j", "period_len"]);
    for r in terms {
        t.push(vec![r.j.to_string(), r.n.to_string(), r.k.to_string(), r.period.len().to_string()]);
    }
    t
}

pub fn expansion_table(cfs: &[PeriodicCF]) -> Table {
    let mut t = Table::new(["alpha_p", "alpha_d", "alpha_q", "period_len", "preperiod_len"]);
    for cf in cfs {
        let s = &cf.source;
        t.push(vec![
            s.p().to_string(),
            s.d().to_string(),
            s.q().to_string(),
            cf.period_len().to_string(),
            cf.preperiod.len().to_string(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Execution;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn crosscheck_sqrt2() {
        let r2 = Surd::sqrt(2).unwrap();
        let c = growth_crosscheck(&r2, &q(5, 1), 1_000_000).unwrap();
        assert_eq!((c.k_pred, c.k_actual), (3, 3));
        let c = growth_crosscheck(&r2, &q(1, 1), 1_000_000).unwrap();
        assert_eq!((c.k_pred, c.k_actual), (1, 1));
        for n in 1..=10 {
            let c = growth_crosscheck(&r2, &q(1 << n, 1), 1_000_000).unwrap();
            assert!(c.equal, "2^{n}: {c:?}");
        }
    }

    #[test]
    fn crosscheck_negative_exponents() {
        let r3 = Surd::sqrt(3).unwrap();
        for (a, b) in [(1, 5), (3, 7), (-2, 9), (10, 3), (1, 4)] {
            let c = growth_crosscheck(&r3, &q(a, b), 1_000_000).unwrap();
            assert!(c.equal, "{a}/{b}: {c:?}");
        }
        let phi = Surd::from_i64(1, 5, 2).unwrap();
        for (a, b) in [(1, 2), (5, 1), (2, 11)] {
            let c = growth_crosscheck(&phi, &q(a, b), 1_000_000).unwrap();
            assert!(c.equal, "{a}/{b}: {c:?}");
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let mut cfg = SweepConfig { n_max: 6, ..SweepConfig::default() };
        let a = freq_table(&freq_sweep(&cfg).unwrap(), &cfg.patterns, 12).to_csv().unwrap();
        cfg.exec = Execution::Sequential;
        let b = freq_table(&freq_sweep(&cfg).unwrap(), &cfg.patterns, 12).to_csv().unwrap();
        assert_eq!(a, b);
        let rows = period_sweep(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.k_pred == r.k_actual));
    }

    #[test]
    fn atomic_start_and_degenerate_point() {
        // phi = [1; 1, 1, ...]: the period is the single digit 1
        let cfg = SweepConfig {
            alpha: Surd::from_i64(1, 5, 2).unwrap(),
            n_max: 2,
            patterns: vec![vec![1]],
            ..SweepConfig::default()
        };
        let s = freq_sweep(&cfg).unwrap();
        let e0 = s.rows[0].errors[0];
        assert!((e0 - (1.0 - (4.0f64 / 3.0).log2())).abs() < 1e-12);
        let cfg = SweepConfig { alpha: Surd::from_i64(0, 50, 1).unwrap(), n_max: 0, patterns: vec![vec![1]], ..cfg };
        let s = freq_sweep(&cfg).unwrap();
        assert!((s.rows[0].errors[0] - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn truncated_rows_continue() {
        let cfg = SweepConfig { n_max: 12, max_steps: 50, ..SweepConfig::default() };
        let s = freq_sweep(&cfg).unwrap();
        assert!(s.rows.iter().any(|r| r.truncated));
        assert!(!s.rows[0].truncated);
    }
}
