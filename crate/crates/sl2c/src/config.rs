//! Experiment configuration, shared by the command line and JSON files.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum GenMode {
    #[serde(rename = "random")]
    #[value(name = "random")]
    Random,
    #[serde(rename = "xi_random")]
    #[value(name = "xi_random")]
    XiRandom,
    #[serde(rename = "xi_explicit")]
    #[value(name = "xi_explicit")]
    XiExplicit,
    #[serde(rename = "appendixB")]
    #[value(name = "appendixB")]
    AppendixB,
    #[serde(rename = "explicit")]
    #[value(name = "explicit")]
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Algorithm {
    Linear,
    GenericD,
    GenericCommute,
    GenericCompressed,
    Even,
    Pqtz,
    Oracle,
    Mixing,
    Table6,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Table,
}

fn one() -> u32 {
    1
}

fn default_threads() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Fixed characteristic; overrides the range.
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub p_min: Option<u64>,
    #[serde(default)]
    pub p_max: Option<u64>,
    /// Target lg q; each trial uses n = round(N / lg p).
    #[serde(rename = "N")]
    pub big_n: u32,
    pub gen: GenMode,
    pub alg: Algorithm,
    #[serde(default = "one")]
    pub trials: u32,
    #[serde(default)]
    pub seed: u64,
    /// Samples per search (engine default when absent); work cap for the oracle.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Use fixed-length walks of this length instead of the level enumerator.
    #[serde(default)]
    pub segment_len: Option<usize>,
    #[serde(default)]
    pub dp_bits: u32,
    #[serde(default)]
    pub out: Format,
    /// ξ0, ξ1 for `xi_explicit`, in field-element text form.
    #[serde(default)]
    pub xi: Option<[String; 2]>,
    /// A0, A1 for `explicit`, as "[a,b;c,d]".
    #[serde(default)]
    pub matrices: Option<[String; 2]>,
    /// Worker threads for trials; 1 is sequential.
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(p_min: u64, p_max: u64, big_n: u32, gen: GenMode, alg: Algorithm, trials: u32, seed: u64) -> Self {
        ExperimentConfig {
            p: None,
            p_min: Some(p_min),
            p_max: Some(p_max),
            big_n,
            gen,
            alg,
            trials,
            seed,
            budget: None,
            segment_len: None,
            dp_bits: 0,
            out: Format::Csv,
            xi: None,
            matrices: None,
            threads: 1,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Inclusive range of p.
    pub fn p_range(&self) -> Result<(u64, u64)> {
        match (self.p, self.p_min, self.p_max) {
            (Some(p), _, _) => Ok((p, p)),
            (None, Some(lo), Some(hi)) if lo <= hi => Ok((lo, hi)),
            (None, Some(_), Some(_)) => Err(Error::Config("p_min exceeds p_max".into())),
            _ => Err(Error::Config("give p or both p_min and p_max".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if matches!(self.alg, Algorithm::Table6) {
            return Ok(());
        }
        let (lo, hi) = self.p_range()?;
        if !(lo..=hi).any(sl2c_core::is_prime) {
            return Err(Error::Config(format!("no prime in [{lo}, {hi}]")));
        }
        if self.big_n == 0 {
            return Err(Error::Config("N must be positive".into()));
        }
        match (self.alg, self.gen) {
            (Algorithm::Linear, GenMode::Random) => {
                return Err(Error::Config("the linear attack needs det(A0 - A1) = 0; use xi_random, xi_explicit, appendixB or explicit".into()))
            }
            (Algorithm::Even, _) if lo != 2 || hi != 2 => return Err(Error::Config("the even attack needs p = 2".into())),
            (_, GenMode::XiExplicit) if self.xi.is_none() => return Err(Error::Config("xi_explicit needs xi".into())),
            (_, GenMode::Explicit) if self.matrices.is_none() => return Err(Error::Config("explicit needs matrices".into())),
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys() {
        let c = ExperimentConfig::from_json(r#"{"p_min": 2, "p_max": 4, "N": 16, "gen": "xi_random", "alg": "linear", "trials": 3}"#).unwrap();
        assert_eq!(c.big_n, 16);
        assert_eq!(c.trials, 3);
        assert_eq!(c.out, Format::Csv);
        let back = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&back).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = ExperimentConfig::new(2, 4, 16, GenMode::Random, Algorithm::Linear, 1, 0);
        assert!(c.validate().is_err());
        c.gen = GenMode::XiRandom;
        c.validate().unwrap();
        c.trials = 0;
        assert!(c.validate().is_err());
        let c = ExperimentConfig::new(24, 28, 16, GenMode::XiRandom, Algorithm::Linear, 1, 0);
        assert!(c.validate().is_err());
        let c = ExperimentConfig::new(3, 3, 16, GenMode::Random, Algorithm::Even, 1, 0);
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"N": 16, "gen": "appendixB", "alg": "linear"}"#).is_err());
    }
}
