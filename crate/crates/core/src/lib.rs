//! Boredom-avoiding tabular Q-learning for interactive agents.
//!
//! FRAC-Q-learning learns over five action *categories* instead of individual
//! actions, suppresses recently used categories when ranking them, picks the
//! concrete action at random inside the chosen category, and forgets its whole
//! value table after a streak of penalties. Traditional per-action Q-learning
//! and a uniform-random policy are provided for comparison.
//!
//! Modules:
//! - [`learner`]: both learners, the shared ranked selection policy, and the
//!   random baseline
//! - [`sensing`]: readings to sub-scores, fused state, reward
//! - [`simulator`]: synthetic users with satiation and recovery
//! - [`harness`]: seeded sessions, cohorts, exports
//! - [`stats`]: Welch's t-test

pub mod catalog;
pub mod error;
pub mod harness;
pub mod learner;
pub mod sensing;
pub mod simulator;
pub mod stats;

pub use catalog::ActionCatalog;
pub use error::{Error, Result};
pub use learner::{Algorithm, Learner, LearnerConfig, QTable, RecencyTrackers, StepRecord};
pub use sensing::{EmotionLabel, SensorReadings, StateId};
