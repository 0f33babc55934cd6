//! Summary statistics in the min / median / mean (sd) / max layout.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single value.
    pub sd: f64,
    pub max: f64,
}

impl Summary {
    /// `None` for an empty slice.
    pub fn of(xs: &[f64]) -> Option<Summary> {
        if xs.is_empty() {
            return None;
        }
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        let mean = v.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt() } else { 0.0 };
        Some(Summary { min: v[0], median, mean, sd, max: v[n - 1] })
    }
}

/// How a column is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// Raw count.
    Raw,
    SqrtQ,
    Q,
    LgQ,
    /// L = lg²q / lg lg q.
    BigL,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::Raw => "raw",
            Norm::SqrtQ => "sqrt_q",
            Norm::Q => "q",
            Norm::LgQ => "lg_q",
            Norm::BigL => "L",
        }
    }

    pub fn parse(s: &str) -> Option<Norm> {
        [Norm::Raw, Norm::SqrtQ, Norm::Q, Norm::LgQ, Norm::BigL].into_iter().find(|n| n.as_str() == s)
    }

    /// Divisor for a field with lg q = `lg_q`.
    pub fn scale(self, lg_q: f64) -> f64 {
        match self {
            Norm::Raw => 1.0,
            Norm::SqrtQ => (lg_q / 2.0).exp2(),
            Norm::Q => lg_q.exp2(),
            Norm::LgQ => lg_q,
            Norm::BigL => lg_q * lg_q / lg_q.log2(),
        }
    }

    /// Unit suffix in the table layout.
    pub fn unit(self) -> &'static str {
        match self {
            Norm::Raw => "",
            Norm::SqrtQ => "sqrt(q)",
            Norm::Q => "q",
            Norm::LgQ => "lg q",
            Norm::BigL => "L",
        }
    }
}

/// One measured quantity of an experiment: work and length, normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub p_range: String,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub trials: u32,
    /// total, diag, tri, phase2, identity, ...
    pub metric: String,
    pub work_norm: Norm,
    pub work: Summary,
    pub length_norm: Norm,
    pub length: Summary,
    pub work_raw: Summary,
    pub length_raw: Summary,
    pub failures: u32,
}
