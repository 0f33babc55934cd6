//! Batch runs: one field, generator pair and attack per trial, then summaries.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sl2c_core::analysis::bfs_shortest_collision;
use sl2c_core::attacks::{generic_attack, linear_attack, Collision, Phase2, SamplerKind, SearchOpts};
use sl2c_core::engine::{derive_seed, verify_collision};
use sl2c_core::special::{even_attack, pqtz_attack};
use sl2c_core::words::hash;
use sl2c_core::{Field, GeneratorPair, Group, Matrix};

use crate::config::{Algorithm, ExperimentConfig};
use crate::presets::{degree_for, generators, random_prime};
use crate::stats::{Norm, StatsRow, Summary};
use crate::{Error, Result};

/// Everything measured in one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub seed: u64,
    pub p: u64,
    pub n: u32,
    pub lg_q: f64,
    pub method: String,
    pub success: bool,
    pub verified: bool,
    pub work: u64,
    pub length: usize,
    pub u0_len: Option<usize>,
    pub diag_work: Option<u64>,
    pub tri_work: Option<u64>,
    pub u1_len: Option<usize>,
    pub phase2_work: Option<u64>,
    pub identity_len: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub rows: Vec<StatsRow>,
    pub log: Vec<TrialRecord>,
}

impl Experiment {
    pub fn all_verified(&self) -> bool {
        self.log.iter().all(|r| r.success && r.verified)
    }
}

/// The field and generators of a trial, before any attack runs.
pub struct Instance {
    pub field: Field,
    pub gens: GeneratorPair,
    pub opts: SearchOpts,
}

pub fn trial_seed(cfg: &ExperimentConfig, trial: u32) -> u64 {
    derive_seed(cfg.seed, trial as u64)
}

/// Fields are rebuilt often across trials with few distinct (p, n); building the
/// log tables dominates small attacks, so built fields are kept.
fn field(p: u64, n: u32) -> Result<Field> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().expect("field cache").get(&(p, n)) {
        return Ok(f.clone());
    }
    let f = Field::new(p, n)?;
    let mut c = cache.lock().expect("field cache");
    if c.len() > 256 {
        c.clear();
    }
    c.insert((p, n), f.clone());
    Ok(f)
}

pub fn instance(cfg: &ExperimentConfig, trial: u32) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg, trial));
    let (lo, hi) = cfg.p_range()?;
    let p = random_prime(lo, hi, &mut rng)?;
    let field = field(p, degree_for(p, cfg.big_n))?;
    let g = Group::new(field.clone());
    let gens = generators(&g, cfg.gen, cfg.xi.as_ref(), cfg.matrices.as_ref(), &mut rng)?;
    let sampler = match cfg.segment_len {
        Some(segment_length) => SamplerKind::Walk { segment_length },
        None => SamplerKind::Levels,
    };
    let opts = SearchOpts { seed: rng.next_u64(), budget: cfg.budget, dp_bits: cfg.dp_bits, sampler };
    Ok(Instance { field, gens, opts })
}

/// Default work cap of the breadth-first oracle: 64q + 2^12.
pub fn oracle_cap(f: &Field) -> u64 {
    (64 * f.q()).min(1 << 40) as u64 + 4096
}

fn attack(cfg: &ExperimentConfig, g: &Group, inst: &Instance, rec: &mut TrialRecord) -> sl2c_core::Result<Collision> {
    let (a, opts) = (&inst.gens, &inst.opts);
    match cfg.alg {
        Algorithm::Linear => linear_attack(g, a, opts),
        Algorithm::GenericD => generic_attack(g, a, Phase2::IntoD, false, opts),
        Algorithm::GenericCommute => generic_attack(g, a, Phase2::Commute, false, opts),
        Algorithm::GenericCompressed => generic_attack(g, a, Phase2::Commute, true, opts),
        Algorithm::Even => even_attack(g, a, opts),
        Algorithm::Oracle => bfs_shortest_collision(g, a, cfg.budget.unwrap_or_else(|| oracle_cap(g.field()))),
        Algorithm::Pqtz => {
            let r = pqtz_attack(g, a, opts)?;
            rec.identity_len = Some(r.identity_word.len());
            if hash(&Group::new(g.field().clone()), a, &r.identity_word) != Matrix::IDENTITY {
                return Err(sl2c_core::Error::Verification);
            }
            Ok(r.collision)
        }
        Algorithm::Mixing | Algorithm::Table6 => Err(sl2c_core::Error::Precondition("not a per-trial algorithm")),
    }
}

pub fn run_trial(cfg: &ExperimentConfig, trial: u32) -> TrialRecord {
    let mut rec = TrialRecord {
        trial,
        seed: trial_seed(cfg, trial),
        p: 0,
        n: 0,
        lg_q: 0.0,
        method: String::new(),
        success: false,
        verified: false,
        work: 0,
        length: 0,
        u0_len: None,
        diag_work: None,
        tri_work: None,
        u1_len: None,
        phase2_work: None,
        identity_len: None,
        error: None,
    };
    let inst = match instance(cfg, trial) {
        Ok(i) => i,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.p = inst.field.p();
    rec.n = inst.field.n();
    rec.lg_q = inst.field.lg_q();
    let g = Group::new(inst.field.clone());
    match attack(cfg, &g, &inst, &mut rec) {
        Ok(c) => {
            rec.success = true;
            rec.verified = verify_collision(&inst.field, &inst.gens, &c.w1, &c.w2);
            rec.method = c.method.as_str().into();
            rec.work = c.work;
            rec.length = c.length;
            if let Some(ph) = &c.phases {
                rec.u0_len = Some(ph.u0_len);
                rec.diag_work = Some(ph.diag_work);
                rec.tri_work = Some(ph.tri_work);
                rec.u1_len = Some(ph.u1_len);
                rec.phase2_work = Some(ph.phase2_work);
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn is_generic(alg: Algorithm) -> bool {
    matches!(alg, Algorithm::GenericD | Algorithm::GenericCommute | Algorithm::GenericCompressed)
}

struct Metric {
    name: &'static str,
    work_norm: Norm,
    length_norm: Norm,
    /// (work, length) of a trial, if it has this metric.
    get: fn(&TrialRecord) -> Option<(f64, f64)>,
}

fn metrics(alg: Algorithm) -> Vec<Metric> {
    let total = |r: &TrialRecord| Some((r.work as f64, r.length as f64));
    let mut v = vec![Metric {
        name: "total",
        work_norm: if alg == Algorithm::Oracle { Norm::Q } else { Norm::SqrtQ },
        length_norm: if is_generic(alg) { Norm::BigL } else { Norm::LgQ },
        get: total,
    }];
    if is_generic(alg) {
        v.push(Metric { name: "diag", work_norm: Norm::Raw, length_norm: Norm::Raw, get: |r| Some((r.diag_work? as f64, r.u0_len? as f64)) });
        v.push(Metric { name: "tri", work_norm: Norm::SqrtQ, length_norm: Norm::LgQ, get: |r| Some((r.tri_work? as f64, r.u1_len? as f64)) });
        v.push(Metric { name: "phase2", work_norm: Norm::SqrtQ, length_norm: Norm::BigL, get: |r| Some((r.phase2_work? as f64, r.length as f64)) });
    }
    if alg == Algorithm::Pqtz {
        v.push(Metric { name: "identity", work_norm: Norm::SqrtQ, length_norm: Norm::LgQ, get: |r| Some((r.work as f64, r.identity_len? as f64)) });
    }
    v
}

/// Statistics over the successful, verified trials of a log.
pub fn summarize(cfg: &ExperimentConfig, log: &[TrialRecord]) -> Result<Vec<StatsRow>> {
    let (lo, hi) = cfg.p_range()?;
    let good: Vec<&TrialRecord> = log.iter().filter(|r| r.success && r.verified).collect();
    let failures = (log.len() - good.len()) as u32;
    let mut rows = Vec::new();
    for m in metrics(cfg.alg) {
        let pts: Vec<(f64, f64, f64)> = good.iter().filter_map(|r| (m.get)(r).map(|(w, l)| (w, l, r.lg_q))).collect();
        let col = |f: &dyn Fn(&(f64, f64, f64)) -> f64| Summary::of(&pts.iter().map(f).collect::<Vec<_>>()).unwrap_or_default();
        rows.push(StatsRow {
            p_range: format!("[{lo}, {hi}]"),
            big_n: cfg.big_n,
            trials: log.len() as u32,
            metric: m.name.into(),
            work_norm: m.work_norm,
            work: col(&|x| x.0 / m.work_norm.scale(x.2)),
            length_norm: m.length_norm,
            length: col(&|x| x.1 / m.length_norm.scale(x.2)),
            work_raw: col(&|x| x.0),
            length_raw: col(&|x| x.1),
            failures,
        });
    }
    Ok(rows)
}

/// Runs every trial (in parallel when `threads > 1`; the log is in trial order either
/// way) and summarizes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    if matches!(cfg.alg, Algorithm::Mixing | Algorithm::Table6) {
        return Err(Error::Config("mixing and table6 are not trial experiments".into()));
    }
    let log: Vec<TrialRecord> = if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build().map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect())
    } else {
        (0..cfg.trials).map(|t| run_trial(cfg, t)).collect()
    };
    let rows = summarize(cfg, &log)?;
    Ok(Experiment { rows, log })
}

/// The per-trial log as CSV.
pub fn log_csv(log: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in log {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_log_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GenMode;
    use crate::emit::to_csv;

    #[test]
    fn single_trial_is_reproducible() {
        let cfg = ExperimentConfig::new(7, 13, 12, GenMode::XiRandom, Algorithm::Linear, 1, 42);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.all_verified());
        assert_eq!(a.log.len(), 1);
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut cfg = ExperimentConfig::new(2, 4, 12, GenMode::Random, Algorithm::GenericCompressed, 12, 5);
        let seq = run_experiment(&cfg).unwrap();
        cfg.threads = 4;
        let par = run_experiment(&cfg).unwrap();
        assert_eq!(to_csv(&seq.rows).unwrap(), to_csv(&par.rows).unwrap());
        assert_eq!(seq.log, par.log);
        assert_eq!(seq.rows.len(), 4);
    }

    #[test]
    fn stats_recompute_from_log() {
        let cfg = ExperimentConfig::new(50, 100, 14, GenMode::XiRandom, Algorithm::Linear, 40, 9);
        let e = run_experiment(&cfg).unwrap();
        let back = parse_log_csv(&log_csv(&e.log).unwrap()).unwrap();
        assert_eq!(back.len(), e.log.len());
        let w: Vec<f64> = back.iter().filter(|r| r.success && r.verified).map(|r| r.work as f64 / Norm::SqrtQ.scale(r.lg_q)).collect();
        let s = Summary::of(&w).unwrap();
        let row = &e.rows[0];
        assert!((s.mean - row.work.mean).abs() <= 1e-9 * row.work.mean.abs());
        assert!((s.sd - row.work.sd).abs() <= 1e-9 * row.work.sd.abs().max(1e-300));
    }

    #[test]
    fn failures_are_counted() {
        let mut cfg = ExperimentConfig::new(251, 251, 8, GenMode::XiRandom, Algorithm::Oracle, 3, 1);
        cfg.budget = Some(3);
        let e = run_experiment(&cfg).unwrap();
        assert_eq!(e.rows[0].failures, 3);
        assert!(!e.all_verified());
        assert!(e.log.iter().all(|r| r.error.is_some()));
    }
}
