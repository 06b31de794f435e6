//! The two learners and the random baseline.
//!
//! * [`Algorithm::Frac`] learns a `4 x 5` table over action categories. A
//!   category is picked by ranked selection over `Q - R`, where `R` suppresses
//!   recently used categories, and an action is then drawn uniformly inside it.
//!   After `t_f` consecutive penalties the whole table is forgotten.
//! * [`Algorithm::Traditional`] learns a `4 x 45` table over actions with the
//!   same ranked selection on raw values, no suppression and no forgetting.
//! * [`Algorithm::Random`] picks uniformly among all actions and never learns.
//!
//! A step is split in two so that the response can come from anywhere (a
//! simulated user, a person in front of a browser): [`Learner::begin_step`]
//! selects, [`Learner::complete_step`] consumes the observed readings.

mod qtable;
mod recency;
mod selection;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use qtable::{update_q, QTable};
pub use recency::{forgetting_observe, recency_tick, ForgettingCounter, RecencyTrackers};
pub use selection::{
    frac_effective_values, r_value, select_action_frac, select_action_traditional, select_ranked,
    SelectionProbs,
};

use crate::catalog::{ActionCatalog, NUM_ACTIONS, NUM_CATEGORIES};
use crate::error::{Error, Result};
use crate::sensing::{fuse_state, reward_for_state, ScoreBreakdown, SensorReadings, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Frac,
    #[serde(alias = "q")]
    Traditional,
    Random,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Frac => "frac",
            Algorithm::Traditional => "traditional",
            Algorithm::Random => "random",
        }
    }

    /// Width of the value table this algorithm maintains.
    pub fn table_width(self) -> usize {
        match self {
            Algorithm::Frac => NUM_CATEGORIES,
            Algorithm::Traditional | Algorithm::Random => NUM_ACTIONS,
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frac" => Ok(Algorithm::Frac),
            "traditional" | "q" => Ok(Algorithm::Traditional),
            "random" => Ok(Algorithm::Random),
            other => Err(Error::config(format!(
                "unknown algorithm {other:?}; expected frac, traditional (or q), random"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub gamma: f64,
    /// Consecutive penalties that trigger forgetting.
    pub t_f: u32,
    /// Maximum recency suppression.
    pub c_m: f64,
    /// Steps over which suppression decays to zero.
    pub t_s: u32,
    pub selection_probs: SelectionProbs,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            alpha: 0.9,
            gamma: 0.5,
            t_f: 10,
            c_m: 15.0,
            t_s: 3,
            selection_probs: SelectionProbs::default(),
            seed: 0,
        }
    }
}

impl LearnerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            out.push(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            out.push(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if self.t_f < 1 {
            out.push("t_f must be >= 1".to_string());
        }
        if !(self.c_m.is_finite() && self.c_m > 0.0) {
            out.push(format!("c_m must be > 0, got {}", self.c_m));
        }
        if self.t_s < 1 {
            out.push("t_s must be > 0".to_string());
        }
        out.extend(self.selection_probs.problems());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

/// The outcome of the selection half of a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub step_index: u64,
    pub state_before: StateId,
    pub category_id: usize,
    pub action_id: usize,
    /// Values that were ranked: `Q - R` per category for FRAC, raw Q per
    /// action for traditional, empty for random.
    pub effective_values: Vec<f64>,
}

/// Full trace of one completed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based.
    pub step_index: u64,
    pub state_before: StateId,
    pub category_id: usize,
    pub action_id: usize,
    pub readings: SensorReadings,
    pub scores: ScoreBreakdown,
    pub state_after: StateId,
    pub reward: f64,
    pub forgot: bool,
    pub effective_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepPhase {
    AwaitingBegin,
    AwaitingResponse,
}

#[derive(Debug, Clone)]
pub struct Learner {
    algorithm: Algorithm,
    config: LearnerConfig,
    catalog: Arc<ActionCatalog>,
    q: QTable,
    trackers: RecencyTrackers,
    forgetting: ForgettingCounter,
    state: StateId,
    completed: u64,
    rng: ChaCha8Rng,
    pending: Option<Selection>,
}

impl Learner {
    pub fn new(
        algorithm: Algorithm,
        config: LearnerConfig,
        catalog: Arc<ActionCatalog>,
    ) -> Result<Self> {
        config.validate()?;
        Ok(Learner {
            algorithm,
            q: QTable::zeros(algorithm.table_width()),
            trackers: RecencyTrackers::new(config.t_s),
            forgetting: ForgettingCounter::new(),
            state: StateId::NEUTRAL,
            completed: 0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            pending: None,
            catalog,
            config,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn catalog(&self) -> &ActionCatalog {
        &self.catalog
    }

    pub fn q_table(&self) -> &QTable {
        &self.q
    }

    pub fn trackers(&self) -> &RecencyTrackers {
        &self.trackers
    }

    pub fn forgetting(&self) -> &ForgettingCounter {
        &self.forgetting
    }

    /// State the next step starts from.
    pub fn current_state(&self) -> StateId {
        self.state
    }

    pub fn steps_completed(&self) -> u64 {
        self.completed
    }

    pub fn pending(&self) -> Option<&Selection> {
        self.pending.as_ref()
    }

    pub fn phase(&self) -> StepPhase {
        if self.pending.is_some() {
            StepPhase::AwaitingResponse
        } else {
            StepPhase::AwaitingBegin
        }
    }

    pub fn begin_step(&mut self) -> Result<&Selection> {
        if self.pending.is_some() {
            return Err(Error::Phase("step already begun; submit a response first"));
        }
        let state_before = self.state;
        let (category_id, action_id, effective_values) = match self.algorithm {
            Algorithm::Frac => select_action_frac(
                &self.q,
                state_before,
                &self.trackers,
                &self.catalog,
                &self.config,
                &mut self.rng,
            )?,
            Algorithm::Traditional => {
                let a =
                    select_action_traditional(&self.q, state_before, &self.config, &mut self.rng)?;
                (
                    self.catalog.category_of(a),
                    a,
                    self.q.row(state_before).to_vec(),
                )
            }
            Algorithm::Random => {
                let a = self.rng.random_range(0..self.catalog.num_actions());
                (self.catalog.category_of(a), a, Vec::new())
            }
        };
        Ok(self.pending.insert(Selection {
            step_index: self.completed + 1,
            state_before,
            category_id,
            action_id,
            effective_values,
        }))
    }

    /// Learns from the response to the pending selection. Invalid readings
    /// leave the learner untouched and the selection pending.
    pub fn complete_step(&mut self, readings: &SensorReadings) -> Result<StepRecord> {
        if self.pending.is_none() {
            return Err(Error::Phase("no step in progress; begin a step first"));
        }
        let (scores, state_after) = fuse_state(readings)?;
        let sel = self.pending.take().expect("checked above");
        let reward = reward_for_state(state_after);

        let column = match self.algorithm {
            Algorithm::Frac => Some(sel.category_id),
            Algorithm::Traditional => Some(sel.action_id),
            Algorithm::Random => None,
        };
        if let Some(column) = column {
            update_q(
                &mut self.q,
                sel.state_before,
                column,
                reward,
                state_after,
                self.config.alpha,
                self.config.gamma,
            )?;
        }

        let mut forgot = false;
        if self.algorithm == Algorithm::Frac {
            forgot = self
                .forgetting
                .observe(reward, &mut self.q, self.config.t_f);
            self.trackers.tick(sel.category_id);
        }

        self.state = state_after;
        self.completed += 1;
        Ok(StepRecord {
            step_index: sel.step_index,
            state_before: sel.state_before,
            category_id: sel.category_id,
            action_id: sel.action_id,
            readings: *readings,
            scores,
            state_after,
            reward,
            forgot,
            effective_values: sel.effective_values,
        })
    }

    /// One full cycle against a pre-recorded response.
    pub fn step(&mut self, readings: &SensorReadings) -> Result<StepRecord> {
        readings.validate()?;
        self.begin_step()?;
        self.complete_step(readings)
    }

    /// One full cycle where the response depends on the selected action.
    pub fn step_with<F>(&mut self, respond: F) -> Result<StepRecord>
    where
        F: FnOnce(&Selection) -> SensorReadings,
    {
        let readings = respond(self.begin_step()?);
        match self.complete_step(&readings) {
            Ok(rec) => Ok(rec),
            Err(e) => {
                self.pending = None;
                Err(e)
            }
        }
    }
}

/// Free-function form of [`Learner::step`].
pub fn learner_step(learner: &mut Learner, observed: &SensorReadings) -> Result<StepRecord> {
    learner.step(observed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::EmotionLabel;

    fn learner(algorithm: Algorithm, seed: u64) -> Learner {
        Learner::new(
            algorithm,
            LearnerConfig::default().with_seed(seed),
            Arc::new(ActionCatalog::default()),
        )
        .unwrap()
    }

    fn happy() -> SensorReadings {
        SensorReadings::new(9.5, 30.0, EmotionLabel::Happy)
    }

    fn sad() -> SensorReadings {
        SensorReadings::new(0.0, 120.0, EmotionLabel::Sad)
    }

    #[test]
    fn first_frac_step() {
        let mut l = learner(Algorithm::Frac, 42);
        assert_eq!(l.q_table().cols(), 5);
        let rec = l.step(&happy()).unwrap();
        assert_eq!(rec.step_index, 1);
        assert_eq!(rec.state_before, StateId::NEUTRAL);
        assert_eq!(rec.state_after, StateId::VERY_POSITIVE);
        assert_eq!(rec.reward, 10.0);
        assert_eq!(l.q_table().get(StateId::NEUTRAL, rec.category_id), 9.0);
        assert_eq!(l.catalog().category_of(rec.action_id), rec.category_id);
        assert_eq!(l.trackers().t_ca()[rec.category_id], 0);
        assert_eq!(l.current_state(), StateId::VERY_POSITIVE);
    }

    #[test]
    fn traditional_updates_action_column() {
        let mut l = learner(Algorithm::Traditional, 42);
        assert_eq!(l.q_table().cols(), 45);
        let rec = l.step(&happy()).unwrap();
        assert_eq!(l.q_table().get(StateId::NEUTRAL, rec.action_id), 9.0);
        assert_eq!(rec.effective_values, vec![0.0; 45]);
        assert_eq!(l.trackers(), &RecencyTrackers::new(3));
    }

    #[test]
    fn random_never_learns() {
        let mut l = learner(Algorithm::Random, 1);
        for i in 0..200 {
            let r = if i % 3 == 0 { happy() } else { sad() };
            let rec = l.step(&r).unwrap();
            assert!(!rec.forgot);
        }
        assert!(l.q_table().is_all_zero());
    }

    #[test]
    fn penalty_trace_forgets_at_ten() {
        let mut l = learner(Algorithm::Frac, 7);
        let forgot: Vec<u64> = (0..30)
            .map(|_| l.step(&sad()).unwrap())
            .filter(|r| r.forgot)
            .map(|r| r.step_index)
            .collect();
        assert_eq!(forgot, vec![10, 20, 30]);
        assert!(l.q_table().is_all_zero());
    }

    #[test]
    fn traditional_never_forgets() {
        let mut l = learner(Algorithm::Traditional, 7);
        assert!((0..30).all(|_| !l.step(&sad()).unwrap().forgot));
        assert!(!l.q_table().is_all_zero());
    }

    #[test]
    fn phase_machine() {
        let mut l = learner(Algorithm::Frac, 3);
        assert!(matches!(l.complete_step(&happy()), Err(Error::Phase(_))));
        let sel = l.begin_step().unwrap().clone();
        assert_eq!(l.phase(), StepPhase::AwaitingResponse);
        assert!(matches!(l.begin_step(), Err(Error::Phase(_))));
        // rejected readings keep the pending selection
        let bad = SensorReadings::new(-1.0, 30.0, EmotionLabel::Happy);
        assert!(matches!(l.complete_step(&bad), Err(Error::Reading(_))));
        assert_eq!(l.pending(), Some(&sel));
        assert!(l.q_table().is_all_zero());
        l.complete_step(&happy()).unwrap();
        assert_eq!(l.phase(), StepPhase::AwaitingBegin);
    }

    #[test]
    fn invalid_readings_rejected_before_selection() {
        let mut l = learner(Algorithm::Frac, 3);
        let before = format!("{l:?}");
        assert!(l
            .step(&SensorReadings::new(1.0, 0.0, EmotionLabel::Happy))
            .is_err());
        assert_eq!(format!("{l:?}"), before);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = LearnerConfig {
            alpha: 0.0,
            gamma: 1.0,
            t_s: 0,
            ..LearnerConfig::default()
        };
        match Learner::new(Algorithm::Frac, cfg, Arc::new(ActionCatalog::default())) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("q".parse::<Algorithm>().unwrap(), Algorithm::Traditional);
        assert_eq!(
            serde_json::from_str::<Algorithm>("\"q\"").unwrap(),
            Algorithm::Traditional
        );
        assert_eq!(
            serde_json::to_string(&Algorithm::Traditional).unwrap(),
            "\"traditional\""
        );
        assert!("dqn".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_overrides_from_partial_json() {
        let cfg: LearnerConfig = serde_json::from_str(r#"{"t_f": 4, "seed": 9}"#).unwrap();
        assert_eq!(cfg.t_f, 4);
        assert_eq!(cfg.alpha, 0.9);
        assert!(serde_json::from_str::<LearnerConfig>(r#"{"alfa": 0.1}"#).is_err());
    }
}
