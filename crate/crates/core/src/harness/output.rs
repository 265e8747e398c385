//! CSV tables. Floats use Rust's shortest round-trip formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::{Aggregate, SweepRow};

pub const ROW_HEADER: [&str; 8] = [
    "scheme",
    "i_th_db",
    "k",
    "trial",
    "sum_rate_bps_hz",
    "total_interference",
    "feasible",
    "discard_reason",
];

pub const AGGREGATE_HEADER: [&str; 7] = [
    "scheme",
    "i_th_db",
    "k",
    "trials_used",
    "trials_discarded",
    "mean_sum_rate",
    "stderr_sum_rate",
];

fn csv_err(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROW_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scheme_id.clone(),
            r.i_th_db.to_string(),
            r.k.to_string(),
            r.trial.to_string(),
            r.sum_rate.to_string(),
            r.total_interference.to_string(),
            r.feasible.to_string(),
            r.discard_reason.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_aggregates<W: Write>(aggregates: &[Aggregate], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER).map_err(csv_err)?;
    for a in aggregates {
        w.write_record([
            a.scheme_id.clone(),
            a.i_th_db.to_string(),
            a.k.to_string(),
            a.trials_used.to_string(),
            a.trials_discarded.to_string(),
            a.mean_sum_rate.to_string(),
            a.stderr_sum_rate.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

/// Writes `rows.csv` and `aggregates.csv` into `dir`, creating it if needed.
pub fn write_csv(rows: &[SweepRow], aggregates: &[Aggregate], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rows_path = dir.join("rows.csv");
    let agg_path = dir.join("aggregates.csv");
    let f = std::fs::File::create(&rows_path).map_err(|e| Error::io(&rows_path, e))?;
    write_rows(rows, std::io::BufWriter::new(f)).map_err(|e| Error::io(&rows_path, e))?;
    let f = std::fs::File::create(&agg_path).map_err(|e| Error::io(&agg_path, e))?;
    write_aggregates(aggregates, std::io::BufWriter::new(f)).map_err(|e| Error::io(&agg_path, e))?;
    Ok((rows_path, agg_path))
}
