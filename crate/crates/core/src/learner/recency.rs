use serde::{Deserialize, Serialize};

use super::qtable::QTable;
use crate::catalog::NUM_CATEGORIES;

/// Steps since each category was last selected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecencyTrackers {
    t_ca: [u32; NUM_CATEGORIES],
}

impl RecencyTrackers {
    /// Every category starts at `t_s`, i.e. unsuppressed.
    pub fn new(t_s: u32) -> Self {
        RecencyTrackers {
            t_ca: [t_s; NUM_CATEGORIES],
        }
    }

    pub fn from_counts(t_ca: [u32; NUM_CATEGORIES]) -> Self {
        RecencyTrackers { t_ca }
    }

    pub fn t_ca(&self) -> &[u32; NUM_CATEGORIES] {
        &self.t_ca
    }

    /// End-of-step update: reset the selected category, age the others.
    pub fn tick(&mut self, selected_category: usize) {
        assert!(
            selected_category < NUM_CATEGORIES,
            "category {selected_category} out of range"
        );
        for (i, t) in self.t_ca.iter_mut().enumerate() {
            *t = if i == selected_category {
                0
            } else {
                t.saturating_add(1)
            };
        }
    }
}

/// Streak of consecutive penalty steps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgettingCounter {
    consecutive_penalties: u32,
}

impl ForgettingCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn consecutive_penalties(&self) -> u32 {
        self.consecutive_penalties
    }

    /// Returns true when this observation completed a streak of `t_f`
    /// penalties, in which case `q` has been zeroed and the streak restarted.
    pub fn observe(&mut self, reward: f64, q: &mut QTable, t_f: u32) -> bool {
        if reward > 0.0 {
            self.consecutive_penalties = 0;
            return false;
        }
        self.consecutive_penalties += 1;
        if self.consecutive_penalties >= t_f {
            q.reset();
            self.consecutive_penalties = 0;
            true
        } else {
            false
        }
    }
}

/// Free-function form of [`ForgettingCounter::observe`].
pub fn forgetting_observe(
    counter: &mut ForgettingCounter,
    reward: f64,
    q: &mut QTable,
    t_f: u32,
) -> bool {
    counter.observe(reward, q, t_f)
}

/// Free-function form of [`RecencyTrackers::tick`].
pub fn recency_tick(trackers: &mut RecencyTrackers, selected_category: usize) {
    trackers.tick(selected_category)
}
