//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys:
//!
//! | key | type | default |
//! |---|---|---|
//! | `alpha` | `P,D,Q` | `0,2,1` |
//! | `k` | integer >= 2 | `2` |
//! | `n_min`, `n_max` | integers | `0`, `10` |
//! | `patterns` | words separated by `;`, digits by `,` | `1;2;1,1` |
//! | `delta0_ref` | rational | `25/64` |
//! | `digits` | decimal places for reals | `12` |
//! | `prec` | bits for high-precision evaluation | `256` |
//! | `max_steps` | expansion step cap | `10000000` |
//! | `budget` | order search cap | `10000000` |
//! | `seed` | integer | `1` |
//! | `exec` | `parallel` or `sequential` | `parallel` |
//! | `csv`, `json` | output paths | none |

use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub alpha: Surd,
    pub k: u64,
    pub n_min: u32,
    pub n_max: u32,
    pub patterns: Vec<Vec<u64>>,
    pub delta0_ref: BigRational,
    pub digits: usize,
    pub prec: u64,
    pub max_steps: usize,
    pub budget: u64,
    pub seed: u64,
    pub exec: Execution,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alpha: Surd::sqrt(2).expect("valid"),
            k: 2,
            n_min: 0,
            n_max: 10,
            patterns: vec![vec![1], vec![2], vec![1, 1]],
            delta0_ref: BigRational::new(25.into(), 64.into()),
            digits: 12,
            prec: 256,
            max_steps: 10_000_000,
            budget: 10_000_000,
            seed: 1,
            exec: Execution::Parallel,
            csv: None,
            json: None,
        }
    }
}

pub fn parse_word(s: &str) -> Result<Vec<u64>> {
    let w = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::InvalidPattern(s.to_string()))?;
    if w.is_empty() || w.contains(&0) {
        return Err(Error::InvalidPattern(s.to_string()));
    }
    Ok(w)
}

pub fn parse_patterns(s: &str) -> Result<Vec<Vec<u64>>> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(parse_word).collect()
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "alpha" => self.alpha = v.parse()?,
            "k" => self.k = num(key, v)?,
            "n_min" => self.n_min = num(key, v)?,
            "n_max" => self.n_max = num(key, v)?,
            "patterns" => self.patterns = parse_patterns(v)?,
            "delta0_ref" => {
                let (a, b) = v.split_once('/').unwrap_or((v, "1"));
                let a: BigInt = num(key, a.trim())?;
                let b: BigInt = num(key, b.trim())?;
                if b == BigInt::from(0) {
                    return Err(Error::Config("delta0_ref: zero denominator".into()));
                }
                self.delta0_ref = BigRational::new(a, b);
            }
            "digits" => self.digits = num(key, v)?,
            "prec" => self.prec = num(key, v)?,
            "max_steps" => self.max_steps = num(key, v)?,
            "budget" => self.budget = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "exec" => {
                self.exec = match v {
                    "parallel" => Execution::Parallel,
                    "sequential" => Execution::Sequential,
                    _ => return Err(Error::Config(format!("exec: unknown mode {v:?}"))),
                }
            }
            "csv" => self.csv = Some(PathBuf::from(v)),
            "json" => self.json = Some(PathBuf::from(v)),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return Err(Error::Config("n_min exceeds n_max".into()));
        }
        if self.k < 2 {
            return Err(Error::Config("k must be at least 2".into()));
        }
        if self.patterns.is_empty() {
            return Err(Error::InvalidPattern("no patterns".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_config() {
        let cfg = SweepConfig::parse(
            "# demo\nalpha = 0,3,1\nk=3\nn_max = 6\npatterns = 1;1,2\nexec = sequential\ndelta0_ref = 1/2\n",
        )
        .unwrap();
        assert_eq!(cfg.alpha, Surd::sqrt(3).unwrap());
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.patterns, vec![vec![1], vec![1, 2]]);
        assert_eq!(cfg.exec, Execution::Sequential);
        assert_eq!(cfg.delta0_ref, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(SweepConfig::parse("nope = 1"), Err(Error::Config(_))));
        assert!(matches!(SweepConfig::parse("patterns = 1,0"), Err(Error::InvalidPattern(_))));
        assert!(matches!(SweepConfig::parse("n_min = 5\nn_max = 2"), Err(Error::Config(_))));
        assert!(SweepConfig::parse("k 3").is_err());
    }
}
