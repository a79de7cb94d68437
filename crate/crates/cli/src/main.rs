//! Command line front end for the `cfgrowth` library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use cfgrowth::cfe::{cylinder, expand, pattern_freq, PeriodicCF};
use cfgrowth::field::{field_data, geodesic_data_with_budget, is_s_split, split_type};
use cfgrowth::harness::{self, config::parse_patterns, config::parse_word, emit, real, SweepConfig, Table};
use cfgrowth::hecke::{degenerate_sequence, sphere_reps};
use cfgrowth::natext::{c_alpha, estimate_c0, lebesgue_mc_check, natext_period};
use cfgrowth::padic::{e_ratio_trace, is_compact_type, k_order, k_order_oracle};
use cfgrowth::{Error, Execution, RationalMat, Result, Surd};

#[derive(Parser)]
#[command(name = "cfgrowth", version, about = "Continued-fraction periods of quadratic irrationals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result table as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Bits of working precision for real evaluation.
    #[arg(long, global = true, value_name = "BITS")]
    prec: Option<u64>,
    /// Decimal places for printed reals.
    #[arg(long, global = true)]
    digits: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    max_steps: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    budget: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Flat key = value experiment file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continued-fraction expansion of (P + sqrt D)/Q.
    Expand(AlphaArg),
    /// Period length and period points.
    Period(AlphaArg),
    /// Frequency of a pattern on the period.
    Freq {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long)]
        word: String,
    },
    /// Cylinder interval of a word and its Gauss-Kuzmin mass.
    Cylinder {
        #[arg(long)]
        word: String,
    },
    /// Fundamental units of Q(sqrt D).
    Pell {
        #[arg(long)]
        d: BigInt,
    },
    /// Stabilizer, unit index and geodesic length.
    Geodesic(AlphaArg),
    /// Decomposition of primes in Q(sqrt D).
    Split {
        #[arg(long)]
        d: BigInt,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// Order function k_{p^n}(delta).
    Korder {
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        /// Use the brute-force scan.
        #[arg(long)]
        oracle: bool,
    },
    /// Representatives of the Hecke sphere of radius H.
    Sphere {
        #[arg(long)]
        h: i64,
    },
    /// n_j sqrt(D) from odd powers of the negative Pell unit.
    Degenerate {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Natural-extension period and c_alpha.
    Natext(AlphaArg),
    /// Estimate c0 from sqrt(d), d <= dmax.
    EstimateC0 {
        #[arg(long)]
        dmax: u64,
        #[arg(long, default_value_t = 50)]
        min_period: usize,
    },
    /// Monte-Carlo invariance check of the natural extension.
    McCheck {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 10)]
        steps: u32,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Pattern frequencies along k^n alpha.
    SweepFreq(SweepArgs),
    /// Period lengths along k^n alpha with the unit-index cross-check.
    SweepPeriod(SweepArgs),
    /// p-adic prediction against the stabilizer index of q alpha.
    Crosscheck {
        #[command(flatten)]
        alpha: AlphaArg,
        /// Rationals, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<String>,
    },
}

#[derive(Args)]
struct AlphaArg {
    /// P,D,Q
    #[arg(long, allow_hyphen_values = true, default_value = "0,2,1")]
    alpha: String,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    /// Words separated by ';', digits by ','.
    #[arg(long)]
    patterns: Option<String>,
}

struct Output {
    json: Value,
    text: String,
    table: Option<Table>,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output { json, text, table: None }
    }

    fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }
}

fn config(g: &Global) -> Result<SweepConfig> {
    let mut cfg = match &g.config {
        Some(p) => SweepConfig::load(p)?,
        None => SweepConfig::default(),
    };
    if let Some(x) = g.prec {
        cfg.prec = x;
    }
    if let Some(x) = g.digits {
        cfg.digits = x;
    }
    if let Some(x) = g.max_steps {
        cfg.max_steps = x;
    }
    if let Some(x) = g.budget {
        cfg.budget = x;
    }
    if let Some(x) = g.seed {
        cfg.seed = x;
    }
    if g.sequential {
        cfg.exec = Execution::Sequential;
    }
    Ok(cfg)
}

fn ratio(s: &str) -> Result<num_rational::BigRational> {
    let bad = || Error::Config(format!("not a rational: {s:?}"));
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a: BigInt = a.trim().parse().map_err(|_| bad())?;
    let b: BigInt = b.trim().parse().map_err(|_| bad())?;
    if b == BigInt::from(0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(num_rational::BigRational::new(a, b))
}

fn matrix(s: &str) -> Result<RationalMat> {
    let e = s
        .split(',')
        .map(ratio)
        .collect::<Result<Vec<_>>>()?;
    let e: [_; 4] = e
        .try_into()
        .map_err(|_| Error::InvalidMatrix(format!("expected a,b,c,d, got {s:?}")))?;
    RationalMat::from_rationals(e)
}

fn digits_text(w: &[u64]) -> String {
    w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn cf_text(cf: &PeriodicCF) -> String {
    format!("[{}; {}({})]", cf.a0, cf.preperiod.iter().map(|a| format!("{a}, ")).collect::<String>(), digits_text(&cf.period))
}

fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let mut cfg = config(g)?;
    let dg = cfg.digits;
    let out = match &cli.cmd {
        Cmd::Expand(a) => {
            let s: Surd = a.alpha.parse()?;
            let cf = expand(&s, cfg.max_steps)?;
            let value = s.eval_hp(cfg.prec).to_decimal(dg);
            let mut t = harness::expansion_table(std::slice::from_ref(&cf));
            t.header.push("value".into());
            t.rows[0].push(value.clone());
            Output::new(
                json!({"alpha": s, "a0": cf.a0.to_string(), "pre": cf.preperiod, "per": cf.period, "value": value}),
                format!("{s} = {}\nvalue {value}", cf_text(&cf)),
            )
            .with_table(t)
        }
        Cmd::Period(a) => {
            let s: Surd = a.alpha.parse()?;
            let cf = expand(&s, cfg.max_steps)?;
            let pts = cf.period_points();
            let mut t = Table::new(["i", "p", "d", "q", "value"]);
            for (i, x) in pts.iter().enumerate() {
                t.push(vec![
                    i.to_string(),
                    x.p().to_string(),
                    x.d().to_string(),
                    x.q().to_string(),
                    x.eval_hp(cfg.prec).to_decimal(dg),
                ]);
            }
            let text = std::iter::once(format!("period length {}", cf.period_len()))
                .chain(pts.iter().map(|x| x.to_string()))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new(json!({"period_len": cf.period_len(), "period": cf.period, "points": pts}), text).with_table(t)
        }
        Cmd::Freq { alpha, word } => {
            let s: Surd = alpha.alpha.parse()?;
            let w = parse_word(word)?;
            let cf = expand(&s, cfg.max_steps)?;
            let f = pattern_freq(&cf, &w)?;
            let mass = cylinder(&w)?.gauss_mass;
            let mut t = Table::new(["word", "freq", "gauss_mass"]);
            t.push(vec![digits_text(&w), f.to_string(), real(mass, dg)]);
            Output::new(
                json!({"word": w, "freq": f.to_string(), "gauss_mass": mass}),
                format!("freq {f}\ngauss mass {}", real(mass, dg)),
            )
            .with_table(t)
        }
        Cmd::Cylinder { word } => {
            let c = cylinder(&parse_word(word)?)?;
            let mut t = Table::new(["word", "lo", "hi", "length", "gauss_mass"]);
            t.push(vec![
                digits_text(&c.word),
                c.lo.to_string(),
                c.hi.to_string(),
                c.length.to_string(),
                real(c.gauss_mass, dg),
            ]);
            let text = format!("({}, {}) length {} mass {}", c.lo, c.hi, c.length, real(c.gauss_mass, dg));
            Output::new(serde_json::to_value(&c)?, text).with_table(t)
        }
        Cmd::Pell { d } => {
            let f = field_data(d)?;
            let (eu, ev) = f.doubled_coords(&f.eps);
            let (pu, pv) = f.doubled_coords(&f.eps_plus);
            let mut text = format!(
                "eps = ({eu} + {ev} sqrt {})/2, norm {}\neps+ = ({pu} + {pv} sqrt {})/2\nt0 {}",
                f.d,
                f.eps_norm,
                f.d,
                real(f.t0, dg)
            );
            if let Some((x, y)) = &f.neg_pell {
                text.push_str(&format!("\nx^2 - {} y^2 = -1: ({x}, {y})", f.d));
            }
            Output::new(serde_json::to_value(&f)?, text)
        }
        Cmd::Geodesic(a) => {
            let s: Surd = a.alpha.parse()?;
            let geo = geodesic_data_with_budget(&s, cfg.budget)?;
            let text = format!(
                "delta {}\ngamma {}\nk_alpha {}\nt0 {}\nt_alpha {}",
                geo.delta,
                geo.gamma_alpha,
                geo.k_alpha,
                real(geo.t0, dg),
                real(geo.t_alpha, dg)
            );
            Output::new(serde_json::to_value(&geo)?, text)
        }
        Cmd::Split { d, primes } => {
            let mut t = Table::new(["p", "type"]);
            let mut js = Vec::new();
            for &p in primes {
                let ty = split_type(d, p)?;
                t.push(vec![p.to_string(), format!("{ty:?}")]);
                js.push(json!({"p": p, "type": ty}));
            }
            let alpha = Surd::new(BigInt::from(0), d.clone(), BigInt::from(1))?;
            let s_split = is_s_split(&alpha, primes)?;
            let text = t
                .rows
                .iter()
                .map(|r| format!("{} {}", r[0], r[1]))
                .chain(std::iter::once(format!("s_split {s_split}")))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new(json!({"primes": js, "s_split": s_split}), text).with_table(t)
        }
        Cmd::Korder { delta, p, n, oracle } => {
            let m = matrix(delta)?;
            if !is_compact_type(&m, *p) {
                return Err(Error::NotCompactType(*p));
            }
            let k = if *oracle {
                k_order_oracle(&m, *p, *n, cfg.budget)?
            } else {
                k_order(&m, *p, *n, cfg.budget)?
            };
            let tr = e_ratio_trace(&m, *p, *n, cfg.budget, cfg.exec)?;
            Output::new(
                json!({"p": p, "n": n, "k": k, "trace": tr}),
                format!("k = {k}\nratio stable from n = {}", tr.stable_from),
            )
            .with_table(harness::trace_table(&tr))
        }
        Cmd::Sphere { h } => {
            let reps = sphere_reps(*h)?;
            Output::new(serde_json::to_value(&reps)?, format!("{} representatives", reps.len()))
                .with_table(harness::sphere_table(&reps))
        }
        Cmd::Degenerate { d, count } => {
            let terms = degenerate_sequence(*d, *count)?;
            let text = terms
                .iter()
                .map(|t| format!("j={} n={} k={} period [{}]", t.j, t.n, t.k, digits_text(&t.period)))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new(serde_json::to_value(&terms)?, text).with_table(harness::degenerate_table(&terms))
        }
        Cmd::Natext(a) => {
            let s: Surd = a.alpha.parse()?;
            let cf = expand(&s, cfg.max_steps)?;
            let (len, j) = natext_period(&cf)?;
            let geo = geodesic_data_with_budget(&s, cfg.budget)?;
            let c = c_alpha(&cf, &geo);
            Output::new(
                json!({"period_len": cf.period_len(), "natext_period": len, "j": j, "t_alpha": geo.t_alpha, "c_alpha": c}),
                format!("period {} natext period {len} j {j}\nc_alpha {}", cf.period_len(), real(c, dg)),
            )
        }
        Cmd::EstimateC0 { dmax, min_period } => {
            let ds: Vec<u64> = (2..=*dmax).collect();
            let est = estimate_c0(&ds, *min_period, cfg.exec)?;
            Output::new(
                serde_json::to_value(&est)?,
                format!("c0 {} spread {} from {} fields", real(est.estimate, dg), real(est.spread, dg), est.rows.len()),
            )
            .with_table(harness::c0_table(&est.rows, dg))
        }
        Cmd::McCheck { samples, steps, bins } => {
            let r = lebesgue_mc_check(*samples, *steps, *bins, cfg.seed, cfg.exec)?;
            Output::new(
                serde_json::to_value(&r)?,
                format!(
                    "chi2 {} dof {} p {}\nmarginal max z {}",
                    real(r.chi2, 4),
                    r.dof,
                    real(r.p_value, 6),
                    real(r.marginal_max_z, 4)
                ),
            )
        }
        Cmd::SweepFreq(a) | Cmd::SweepPeriod(a) => {
            if let Some(x) = &a.alpha {
                cfg.alpha = x.parse()?;
            }
            if let Some(x) = a.k {
                cfg.k = x;
            }
            if let Some(x) = a.n_min {
                cfg.n_min = x;
            }
            if let Some(x) = a.n_max {
                cfg.n_max = x;
            }
            if let Some(x) = &a.patterns {
                cfg.patterns = parse_patterns(x)?;
            }
            if matches!(cli.cmd, Cmd::SweepFreq(_)) {
                let sw = harness::freq_sweep(&cfg)?;
                let t = harness::freq_table(&sw, &cfg.patterns, dg);
                let text = match &sw.summary {
                    Some(s) => format!(
                        "first-triple max {}\nlast-triple max {}\nslope {} (reference {})",
                        real(s.first_triple_max, dg),
                        real(s.last_triple_max, dg),
                        real(s.slope, 4),
                        real(s.reference_slope, 4)
                    ),
                    None => "too few rows for a summary".into(),
                };
                Output::new(serde_json::to_value(&sw)?, text).with_table(t)
            } else {
                let rows = harness::period_sweep(&cfg)?;
                let t = harness::period_table(&rows, dg);
                let text = t.to_csv()?;
                Output::new(serde_json::to_value(&rows)?, text.trim_end().to_string()).with_table(t)
            }
        }
        Cmd::Crosscheck { alpha, q } => {
            let s: Surd = alpha.alpha.parse()?;
            let rows = q
                .iter()
                .map(|x| harness::growth_crosscheck(&s, &ratio(x)?, cfg.budget))
                .collect::<Result<Vec<_>>>()?;
            let t = harness::crosscheck_table(&rows);
            let text = t.to_csv()?;
            Output::new(serde_json::to_value(&rows)?, text.trim_end().to_string()).with_table(t)
        }
    };
    let csv = g.csv.clone().or(cfg.csv.clone());
    if let Some(t) = &out.table {
        emit(t, csv.as_deref(), cfg.json.as_deref())?;
    } else if csv.is_some() {
        return Err(Error::Config("this command has no table output".into()));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.global.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
