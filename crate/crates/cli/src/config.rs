use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

/// Inclusive range `a..b` of truncation degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub start: u32,
    pub end: u32,
}

impl Sweep {
    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected N1..N2, got {s:?}"))?;
        let start = a.trim().parse().map_err(|_| format!("bad sweep start {a:?}"))?;
        let end = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad sweep end {b:?}"))?;
        Ok(Self { start, end })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub degree: u32,
    pub taylor_depth: u32,
    pub mode: Mode,
    pub tolerance: f64,
    pub neumann_depth: usize,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    pub perturbation: Option<PathBuf>,
    pub q_data: Option<PathBuf>,
    pub seed: u64,
    pub sweep: Option<Sweep>,
    pub mu: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            degree: 8,
            taylor_depth: crgjms::qcurv::DEFAULT_TAYLOR_DEPTH,
            mode: Mode::Exact,
            tolerance: crgjms::qcurv::solver::DEFAULT_TOLERANCE,
            neumann_depth: crgjms::parametrix::matrix::DEFAULT_NEUMANN_DEPTH,
            cache_dir: PathBuf::from(".crgjms-cache"),
            out_dir: PathBuf::from("out"),
            perturbation: None,
            q_data: None,
            seed: 0,
            sweep: None,
            mu: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(1..=3).contains(&self.n) {
            return bad(format!("--n must be 1, 2 or 3 (got {})", self.n));
        }
        if self.taylor_depth < 1 {
            return bad("--taylor-depth must be at least 1".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance must be positive (got {})", self.tolerance));
        }
        if let Some(s) = self.sweep {
            if s.start > s.end {
                return bad(format!("empty sweep {s}"));
            }
        }
        if let Some(mu) = &self.mu {
            mu.parse::<crgjms::exact::GaussRational>()
                .ok()
                .filter(|g| g.is_real())
                .ok_or_else(|| CliError::Config(format!("--mu must be a rational number (got {mu:?})")))?;
        }
        Ok(())
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.sweep.map_or_else(|| vec![self.degree], |s| s.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let c = RunConfig {
            perturbation: Some("p.json".into()),
            sweep: Some(Sweep { start: 8, end: 14 }),
            mu: Some("1/3".into()),
            tolerance: 1e-9,
            ..RunConfig::default()
        };
        let s = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn sweep_parsing_and_validation() {
        assert_eq!("10..16".parse::<Sweep>().unwrap().values(), vec![10, 11, 12, 13, 14, 15, 16]);
        assert!("10-16".parse::<Sweep>().is_err());
        let c = RunConfig { sweep: Some(Sweep { start: 5, end: 3 }), ..RunConfig::default() };
        assert!(c.validate().is_err());
        assert!(RunConfig { n: 4, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { taylor_depth: 0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
