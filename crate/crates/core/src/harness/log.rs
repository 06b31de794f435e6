use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{Algorithm, Learner, LearnerConfig, QTable, StepRecord};
use crate::simulator::UserProfile;

/// Post-session answers on two 7-point scales coded -3..=3
/// (+3 = "very interested" / "very hard to get bored").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Questionnaire {
    pub interest: i64,
    pub boredom_hardness: i64,
}

impl Questionnaire {
    pub const SCALE: std::ops::RangeInclusive<i64> = -3..=3;

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        for (name, v) in [
            ("interest", self.interest),
            ("boredom_hardness", self.boredom_hardness),
        ] {
            if !Self::SCALE.contains(&v) {
                bad.push(format!("{name} must be in -3..=3, got {v}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Questionnaire(bad.join("; ")))
        }
    }
}

/// Everything needed to analyse or replay one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub algorithm: Algorithm,
    pub learner_config: LearnerConfig,
    /// Absent for sessions driven by a person.
    pub user_profile: Option<UserProfile>,
    pub session_seed: Option<u64>,
    /// Heatmap column labels: categories for FRAC, actions otherwise.
    pub column_labels: Vec<String>,
    pub records: Vec<StepRecord>,
    /// Q-table after every step.
    pub q_snapshots: Vec<QTable>,
    pub final_q: QTable,
    pub n_speak: Vec<i32>,
    pub cumulative_reward: f64,
    pub questionnaire: Option<Questionnaire>,
}

impl SessionLog {
    pub fn new(
        learner: &Learner,
        user_profile: Option<UserProfile>,
        session_seed: Option<u64>,
    ) -> Self {
        let catalog = learner.catalog();
        let column_labels = match learner.algorithm() {
            Algorithm::Frac => catalog.category_labels(),
            Algorithm::Traditional | Algorithm::Random => catalog.action_labels(),
        }
        .into_iter()
        .map(String::from)
        .collect();
        SessionLog {
            algorithm: learner.algorithm(),
            learner_config: learner.config().clone(),
            user_profile,
            session_seed,
            column_labels,
            records: Vec::new(),
            q_snapshots: Vec::new(),
            final_q: learner.q_table().clone(),
            n_speak: Vec::new(),
            cumulative_reward: 0.0,
            questionnaire: None,
        }
    }

    /// Appends a completed step; `q` is the table right after it.
    pub fn push(&mut self, record: StepRecord, q: &QTable) {
        self.cumulative_reward += record.reward;
        self.n_speak.push(record.scores.n_speak);
        self.q_snapshots.push(q.clone());
        self.final_q = q.clone();
        self.records.push(record);
    }

    pub fn steps(&self) -> usize {
        self.records.len()
    }

    pub fn mean_state(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let sum: f64 = self
            .records
            .iter()
            .map(|r| f64::from(r.state_after.value()))
            .sum();
        sum / self.records.len() as f64
    }

    pub fn total_n_speak(&self) -> i64 {
        self.n_speak.iter().map(|&n| i64::from(n)).sum()
    }

    /// Structural checks shared by harness logs and logs downloaded from the
    /// session service.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let width = self.algorithm.table_width();
        let n = self.records.len();
        if self.q_snapshots.len() != n || self.n_speak.len() != n {
            bad.push(format!(
                "length mismatch: {n} records, {} snapshots, {} n_speak entries",
                self.q_snapshots.len(),
                self.n_speak.len()
            ));
        }
        if self.column_labels.len() != width {
            bad.push(format!(
                "expected {width} column labels, found {}",
                self.column_labels.len()
            ));
        }
        if self.final_q.cols() != width || self.q_snapshots.iter().any(|q| q.cols() != width) {
            bad.push(format!("Q-tables must have {width} columns"));
        }
        if let Some(last) = self.q_snapshots.last() {
            if last != &self.final_q {
                bad.push("final_q differs from the last snapshot".to_string());
            }
        }
        let mut total = 0.0;
        for (i, r) in self.records.iter().enumerate() {
            total += r.reward;
            if r.step_index != i as u64 + 1 {
                bad.push(format!("record {i} has step_index {}", r.step_index));
            }
            if ![-10.0, -5.0, 5.0, 10.0].contains(&r.reward) {
                bad.push(format!(
                    "step {} has reward {} outside the reward set",
                    r.step_index, r.reward
                ));
            }
            if r.forgot && self.q_snapshots.get(i).is_some_and(|q| !q.is_all_zero()) {
                bad.push(format!(
                    "step {} forgot but its snapshot is not all zero",
                    r.step_index
                ));
            }
            if self.n_speak.get(i).is_some_and(|&s| s != r.scores.n_speak) {
                bad.push(format!(
                    "step {} n_speak disagrees with its record",
                    r.step_index
                ));
            }
        }
        if total != self.cumulative_reward {
            bad.push(format!(
                "cumulative_reward {} != sum of rewards {total}",
                self.cumulative_reward
            ));
        }
        if let Some(q) = &self.questionnaire {
            if let Err(e) = q.validate() {
                bad.push(e.to_string());
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }
}
