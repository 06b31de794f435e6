use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensing::{StateId, NUM_STATES};

/// Dense `4 x K` value matrix, rows indexed by state.
///
/// Serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct QTable {
    cols: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(cols: usize) -> Self {
        QTable {
            cols,
            values: vec![0.0; NUM_STATES * cols],
        }
    }

    pub fn rows(&self) -> usize {
        NUM_STATES
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, state: StateId) -> &[f64] {
        let start = state.index() * self.cols;
        &self.values[start..start + self.cols]
    }

    pub fn get(&self, state: StateId, column: usize) -> f64 {
        self.row(state)[column]
    }

    pub fn set(&mut self, state: StateId, column: usize, value: f64) -> Result<()> {
        self.check_column(column)?;
        self.values[state.index() * self.cols + column] = value;
        Ok(())
    }

    pub fn max_in_row(&self, state: StateId) -> f64 {
        self.row(state)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn reset(&mut self) {
        self.values.fill(0.0);
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.cols)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }

    fn check_column(&self, column: usize) -> Result<()> {
        if column < self.cols {
            Ok(())
        } else {
            Err(Error::ColumnOutOfRange {
                column,
                width: self.cols,
            })
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for QTable {
    type Error = String;

    fn try_from(rows: Vec<Vec<f64>>) -> std::result::Result<Self, String> {
        if rows.len() != NUM_STATES {
            return Err(format!("expected {NUM_STATES} rows, found {}", rows.len()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err("rows must be non-empty and equally long".into());
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err("entries must be finite".into());
        }
        Ok(QTable { cols, values })
    }
}

impl From<QTable> for Vec<Vec<f64>> {
    fn from(q: QTable) -> Self {
        q.to_rows()
    }
}

/// One temporal-difference update of `q[state_before][column]`.
///
/// The same rule serves per-action tables and per-category tables; only the
/// meaning of `column` differs.
pub fn update_q(
    q: &mut QTable,
    state_before: StateId,
    column: usize,
    reward: f64,
    state_after: StateId,
    alpha: f64,
    gamma: f64,
) -> Result<()> {
    q.check_column(column)?;
    if !reward.is_finite() {
        return Err(Error::config(format!(
            "reward must be finite, got {reward}"
        )));
    }
    let old = q.get(state_before, column);
    let target = reward + gamma * q.max_in_row(state_after);
    q.set(state_before, column, old + alpha * (target - old))
}
