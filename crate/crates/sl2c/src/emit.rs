//! Text output of statistics rows: CSV, JSON and a fixed-width table.

use std::fmt::Write as _;

use sl2c_core::analysis::{CostPoint, MixingReport};

use crate::config::Format;
use crate::stats::{Norm, StatsRow, Summary};
use crate::{Error, Result};

const STAT_NAMES: [&str; 5] = ["min", "median", "mean", "sd", "max"];

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = ["p_range", "N", "trials", "metric", "work_norm"].map(String::from).to_vec();
    h.extend(STAT_NAMES.iter().map(|s| format!("work_{s}")));
    h.push("length_norm".into());
    h.extend(STAT_NAMES.iter().map(|s| format!("length_{s}")));
    h.extend(STAT_NAMES.iter().map(|s| format!("work_raw_{s}")));
    h.extend(STAT_NAMES.iter().map(|s| format!("length_raw_{s}")));
    h.push("failures".into());
    h
}

fn stats(s: &Summary) -> [String; 5] {
    [s.min, s.median, s.mean, s.sd, s.max].map(|x| x.to_string())
}

fn csv_record(r: &StatsRow) -> Vec<String> {
    let mut v = vec![r.p_range.clone(), r.big_n.to_string(), r.trials.to_string(), r.metric.clone(), r.work_norm.as_str().into()];
    v.extend(stats(&r.work));
    v.push(r.length_norm.as_str().into());
    v.extend(stats(&r.length));
    v.extend(stats(&r.work_raw));
    v.extend(stats(&r.length_raw));
    v.push(r.failures.to_string());
    v
}

pub fn to_csv(rows: &[StatsRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header())?;
    for r in rows {
        w.write_record(csv_record(r))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse(format!("column {i}")))
}

fn summary_at(rec: &csv::StringRecord, i: usize) -> Result<Summary> {
    Ok(Summary { min: field(rec, i)?, median: field(rec, i + 1)?, mean: field(rec, i + 2)?, sd: field(rec, i + 3)?, max: field(rec, i + 4)? })
}

fn norm_at(rec: &csv::StringRecord, i: usize) -> Result<Norm> {
    rec.get(i).and_then(Norm::parse).ok_or_else(|| Error::Parse(format!("norm in column {i}")))
}

/// Inverse of [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<StatsRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    if r.headers()?.iter().ne(csv_header().iter().map(String::as_str)) {
        return Err(Error::Parse("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(StatsRow {
            p_range: field(&rec, 0)?,
            big_n: field(&rec, 1)?,
            trials: field(&rec, 2)?,
            metric: field(&rec, 3)?,
            work_norm: norm_at(&rec, 4)?,
            work: summary_at(&rec, 5)?,
            length_norm: norm_at(&rec, 10)?,
            length: summary_at(&rec, 11)?,
            work_raw: summary_at(&rec, 16)?,
            length_raw: summary_at(&rec, 21)?,
            failures: field(&rec, 26)?,
        });
    }
    Ok(rows)
}

fn cell(x: f64, sd: Option<f64>, norm: Norm) -> String {
    let u = norm.unit();
    let sep = if u.is_empty() { "" } else { " " };
    match sd {
        Some(s) => format!("{x:.2} ({s:.2}){sep}{u}"),
        None => format!("{x:.2}{sep}{u}"),
    }
}

/// Minimum, median, mean (sd) and maximum stacked, one block per row.
pub fn to_table(rows: &[StatsRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} | {:<8} | {:<22} | {:<22} | trials (failed)", "p in", "metric", "work", "length");
    let _ = writeln!(out, "{}", "-".repeat(92));
    for r in rows {
        let w = &r.work;
        let l = &r.length;
        let lines = [
            (cell(w.min, None, r.work_norm), cell(l.min, None, r.length_norm)),
            (cell(w.median, None, r.work_norm), cell(l.median, None, r.length_norm)),
            (cell(w.mean, Some(w.sd), r.work_norm), cell(l.mean, Some(l.sd), r.length_norm)),
            (cell(w.max, None, r.work_norm), cell(l.max, None, r.length_norm)),
        ];
        for (i, (wc, lc)) in lines.iter().enumerate() {
            let (p, m, t) = if i == 0 {
                (r.p_range.as_str(), r.metric.as_str(), format!("{} ({})", r.trials, r.failures))
            } else {
                ("", "", String::new())
            };
            let _ = writeln!(out, "{p:<18} | {m:<8} | {wc:<22} | {lc:<22} | {t}");
        }
        let _ = writeln!(out, "{}", "-".repeat(92));
    }
    out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}

pub fn emit(rows: &[StatsRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        Format::Table => Ok(to_table(rows)),
    }
}

/// One line per walk length: q, m, L1 distance, the spectral bound on it, λ/d.
pub fn mixing_csv(q: u64, r: &MixingReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["q", "group_order", "m", "l1_distance", "half_l1", "bound", "lambda_ratio"])?;
    for ((m, d), b) in r.walk_lengths.iter().zip(&r.l1_distances).zip(r.bounds()) {
        w.write_record([q.to_string(), r.group_order.to_string(), m.to_string(), d.to_string(), (0.5 * d).to_string(), b.to_string(), r.lambda_ratio.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn cost_csv(points: &[CostPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "n0", "n0_exact", "subexp_work_log2", "subexp_length_log2", "our_work_log2", "our_length_log2"])?;
    for c in points {
        w.write_record([
            c.n.to_string(),
            c.n0.to_string(),
            c.n0_exact.to_string(),
            c.subexp_work_log2.to_string(),
            c.subexp_length_log2.to_string(),
            c.our_work_log2.to_string(),
            c.our_length_log2.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Rounded base-2 exponents side by side.
pub fn cost_table(points: &[CostPoint]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<9} | {:>11} {:>9} | {:>11} {:>9}", "", "subexp", "", "ours", "");
    let _ = writeln!(out, "{:<9} | {:>11} {:>9} | {:>11} {:>9}", "q", "work", "length", "work", "length");
    let _ = writeln!(out, "{}", "-".repeat(57));
    for c in points {
        let _ = writeln!(
            out,
            "{:<9} | {:>11} {:>9} | {:>11} {:>9}",
            format!("2^{}", c.n),
            format!("2^{}", c.subexp_work_log2.round()),
            format!("2^{}", c.subexp_length_log2.round()),
            format!("2^{}", c.our_work_log2.round()),
            format!("2^{}", c.our_length_log2),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> StatsRow {
        let s = Summary { min: 0.1, median: 2.3, mean: 2.5, sd: 1.3, max: 8.25 };
        StatsRow {
            p_range: "[2, 4]".into(),
            big_n: 16,
            trials: 10,
            metric: "total".into(),
            work_norm: Norm::SqrtQ,
            work: s,
            length_norm: Norm::LgQ,
            length: Summary { min: 0.7, median: 2.2, mean: 2.16, sd: 0.24, max: 2.68 },
            work_raw: Summary { min: 1.0, median: 590.0, mean: 640.0, sd: 333.0, max: 2112.0 },
            length_raw: Summary { min: 11.0, median: 35.0, mean: 34.56, sd: 3.84, max: 43.0 },
            failures: 1,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let s = to_csv(&[]).unwrap();
        assert_eq!(s.lines().count(), 1);
        assert_eq!(s.trim_end(), csv_header().join(","));
        assert!(parse_csv(&s).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row(), StatsRow { metric: "a,b \"q\"".into(), work: Summary { mean: 1.0 / 3.0, ..row().work }, ..row() }];
        assert_eq!(parse_csv(&to_csv(&rows).unwrap()).unwrap(), rows);
    }

    #[test]
    fn cost_table_rows() {
        let pts = sl2c_core::analysis::subexp_table(&[64, 1024], 80.0).unwrap();
        let t = cost_table(&pts);
        assert!(t.contains("2^64      |       2^143      2^80 |        2^32      2^10"));
        assert!(t.contains("2^1024    |       2^625      2^80 |       2^512      2^18"));
        assert_eq!(cost_csv(&pts).unwrap().lines().count(), 3);
    }

    #[test]
    fn json_round_trip() {
        let rows = vec![row()];
        let s = emit(&rows, Format::Json).unwrap();
        assert_eq!(serde_json::from_str::<Vec<StatsRow>>(&s).unwrap(), rows);
    }
}
