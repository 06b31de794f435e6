//! CSV/JSON exports for plotting with external tools.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::log::SessionLog;
use crate::error::Result;
use crate::learner::QTable;

/// Shortest round-trip form, always with a decimal point or exponent.
fn fmt_value(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Serialize)]
struct SnapshotSeries<'a> {
    algorithm: &'a str,
    column_labels: &'a [String],
    snapshots: Vec<Snapshot<'a>>,
}

#[derive(Serialize)]
struct Snapshot<'a> {
    step_index: u64,
    q_table: &'a QTable,
}

/// Path of the per-step snapshot series written next to a heatmap CSV.
pub fn snapshots_path(heatmap_csv: &Path) -> PathBuf {
    heatmap_csv.with_extension("snapshots.json")
}

/// Writes the final Q-table as CSV (one row per state, one labeled column per
/// category or action) and the per-step snapshots as a companion JSON file.
/// Returns the companion path.
pub fn export_heatmap(log: &SessionLog, path: impl AsRef<Path>) -> Result<PathBuf> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["state".to_string()];
    header.extend(log.column_labels.iter().cloned());
    w.write_record(&header)?;
    for (state, row) in log.final_q.iter_rows().enumerate() {
        let mut rec = vec![state.to_string()];
        rec.extend(row.iter().map(|&v| fmt_value(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let series = SnapshotSeries {
        algorithm: log.algorithm.as_str(),
        column_labels: &log.column_labels,
        snapshots: log
            .records
            .iter()
            .zip(&log.q_snapshots)
            .map(|(r, q)| Snapshot {
                step_index: r.step_index,
                q_table: q,
            })
            .collect(),
    };
    let companion = snapshots_path(path);
    serde_json::to_writer(BufWriter::new(File::create(&companion)?), &series)?;
    Ok(companion)
}

/// `(step_index, n_speak)` per step.
pub fn nspeak_timeline(log: &SessionLog) -> Vec<(u64, i32)> {
    log.records
        .iter()
        .zip(&log.n_speak)
        .map(|(r, &n)| (r.step_index, n))
        .collect()
}

pub fn write_nspeak_timeline(log: &SessionLog, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "n_speak"])?;
    for (step, n) in nspeak_timeline(log) {
        w.write_record([step.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_session_log(log: &SessionLog, path: impl AsRef<Path>) -> Result<()> {
    serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), log)?;
    Ok(())
}

pub fn read_session_log(path: impl AsRef<Path>) -> Result<SessionLog> {
    let log: SessionLog = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(log)
}
