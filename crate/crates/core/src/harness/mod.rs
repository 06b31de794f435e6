//! Seeded sessions and cohorts of a learner against a simulated user.

mod export;
mod log;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use export::{
    export_heatmap, nspeak_timeline, read_session_log, snapshots_path, write_nspeak_timeline,
    write_session_log,
};
pub use log::{Questionnaire, SessionLog};

use crate::catalog::ActionCatalog;
use crate::error::{Error, Result};
use crate::learner::{Algorithm, Learner, LearnerConfig};
use crate::simulator::{SimulatedUser, UserProfile};
use crate::stats::{welch_test_samples, WelchResult};

pub const DEFAULT_STEPS: usize = 60;

const LEARNER_STREAM: u64 = 1;
const USER_STREAM: u64 = 2;
const COHORT_STREAM: u64 = 3;

/// SplitMix64 of `seed` offset by `stream`: independent child seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub algorithm: Algorithm,
    pub steps: usize,
    pub learner_config: LearnerConfig,
    pub user_profile: UserProfile,
    /// Learner and user seeds are derived from this; the seeds inside
    /// `learner_config` and `user_profile` are overwritten.
    pub session_seed: u64,
}

impl SessionConfig {
    pub fn new(algorithm: Algorithm, user_profile: UserProfile, session_seed: u64) -> Self {
        SessionConfig {
            algorithm,
            steps: DEFAULT_STEPS,
            learner_config: LearnerConfig::default(),
            user_profile,
            session_seed,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.steps < 1 {
            problems.push("steps must be >= 1".to_string());
        }
        problems.extend(self.learner_config.problems());
        problems.extend(self.user_profile.problems());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

pub fn run_session(cfg: &SessionConfig) -> Result<SessionLog> {
    run_session_with_catalog(cfg, Arc::new(ActionCatalog::default()))
}

pub fn run_session_with_catalog(
    cfg: &SessionConfig,
    catalog: Arc<ActionCatalog>,
) -> Result<SessionLog> {
    cfg.validate()?;
    let learner_cfg = cfg
        .learner_config
        .clone()
        .with_seed(derive_seed(cfg.session_seed, LEARNER_STREAM));
    let profile = cfg
        .user_profile
        .clone()
        .with_seed(derive_seed(cfg.session_seed, USER_STREAM));

    let mut learner = Learner::new(cfg.algorithm, learner_cfg, catalog)?;
    let mut user = SimulatedUser::new(profile.clone())?;
    let mut log = SessionLog::new(&learner, Some(profile), Some(cfg.session_seed));
    for _ in 0..cfg.steps {
        let rec = learner.step_with(|sel| user.respond(sel.category_id, sel.action_id))?;
        log.push(rec, learner.q_table());
    }
    Ok(log)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortConfig {
    pub algorithms: Vec<Algorithm>,
    pub user_profile: UserProfile,
    pub n_seeds: usize,
    pub base_seed: u64,
    pub steps: usize,
    pub learner_config: LearnerConfig,
}

impl CohortConfig {
    pub fn new(
        algorithms: Vec<Algorithm>,
        user_profile: UserProfile,
        n_seeds: usize,
        base_seed: u64,
    ) -> Self {
        CohortConfig {
            algorithms,
            user_profile,
            n_seeds,
            base_seed,
            steps: DEFAULT_STEPS,
            learner_config: LearnerConfig::default(),
        }
    }

    pub fn session_seeds(&self) -> Vec<u64> {
        (0..self.n_seeds as u64)
            .map(|i| derive_seed(self.base_seed, COHORT_STREAM.wrapping_add(i << 8)))
            .collect()
    }
}

/// Per-session proxies for the questionnaire outcomes, one entry per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmMetrics {
    pub algorithm: Algorithm,
    pub mean_state: Vec<f64>,
    pub cumulative_reward: Vec<f64>,
    pub total_n_speak: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanState,
    CumulativeReward,
    TotalNSpeak,
}

impl AlgorithmMetrics {
    pub fn metric(&self, m: Metric) -> &[f64] {
        match m {
            Metric::MeanState => &self.mean_state,
            Metric::CumulativeReward => &self.cumulative_reward,
            Metric::TotalNSpeak => &self.total_n_speak,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: Algorithm,
    pub b: Algorithm,
    pub metric: Metric,
    pub mean_a: f64,
    pub mean_b: f64,
    pub welch: WelchResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub base_seed: u64,
    pub steps: usize,
    pub session_seeds: Vec<u64>,
    pub per_algorithm: Vec<AlgorithmMetrics>,
    pub comparisons: Vec<Comparison>,
}

/// Runs every algorithm against the same sequence of session seeds, so each
/// algorithm meets identical simulated users, then compares every pair of
/// algorithms on every metric with Welch's test.
pub fn run_cohort(cfg: &CohortConfig) -> Result<CohortSummary> {
    let mut problems = Vec::new();
    if cfg.n_seeds < 2 {
        problems.push(format!(
            "n_seeds must be >= 2 for Welch's test, got {}",
            cfg.n_seeds
        ));
    }
    if cfg.algorithms.is_empty() {
        problems.push("at least one algorithm is required".to_string());
    }
    if cfg.steps < 1 {
        problems.push("steps must be >= 1".to_string());
    }
    problems.extend(cfg.learner_config.problems());
    problems.extend(cfg.user_profile.problems());
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }

    let seeds = cfg.session_seeds();
    let catalog = Arc::new(ActionCatalog::default());
    let jobs: Vec<(Algorithm, u64)> = cfg
        .algorithms
        .iter()
        .flat_map(|&a| seeds.iter().map(move |&s| (a, s)))
        .collect();
    // collect() on an indexed parallel iterator preserves job order
    let logs: Vec<SessionLog> = jobs
        .par_iter()
        .map(|&(algorithm, session_seed)| {
            let session = SessionConfig {
                algorithm,
                steps: cfg.steps,
                learner_config: cfg.learner_config.clone(),
                user_profile: cfg.user_profile.clone(),
                session_seed,
            };
            run_session_with_catalog(&session, Arc::clone(&catalog))
        })
        .collect::<Result<_>>()?;

    let per_algorithm: Vec<AlgorithmMetrics> = cfg
        .algorithms
        .iter()
        .zip(logs.chunks(seeds.len()))
        .map(|(&algorithm, logs)| AlgorithmMetrics {
            algorithm,
            mean_state: logs.iter().map(SessionLog::mean_state).collect(),
            cumulative_reward: logs.iter().map(|l| l.cumulative_reward).collect(),
            total_n_speak: logs.iter().map(|l| l.total_n_speak() as f64).collect(),
        })
        .collect();

    let mut comparisons = Vec::new();
    for (i, a) in per_algorithm.iter().enumerate() {
        for b in &per_algorithm[i + 1..] {
            for metric in [
                Metric::MeanState,
                Metric::CumulativeReward,
                Metric::TotalNSpeak,
            ] {
                let (xa, xb) = (a.metric(metric), b.metric(metric));
                comparisons.push(Comparison {
                    a: a.algorithm,
                    b: b.algorithm,
                    metric,
                    mean_a: crate::stats::mean(xa),
                    mean_b: crate::stats::mean(xb),
                    welch: welch_test_samples(xa, xb)?,
                });
            }
        }
    }

    Ok(CohortSummary {
        base_seed: cfg.base_seed,
        steps: cfg.steps,
        session_seeds: seeds,
        per_algorithm,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::make_profile;

    #[test]
    fn derive_seed_distinct_streams() {
        let s: Vec<u64> = (0..4).map(|k| derive_seed(42, k)).collect();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(derive_seed(42, 1), derive_seed(42, 1));
    }

    #[test]
    fn random_session_never_learns() {
        let cfg = SessionConfig::new(Algorithm::Random, make_profile("bored-fast").unwrap(), 5);
        let log = run_session(&cfg).unwrap();
        assert_eq!(log.steps(), DEFAULT_STEPS);
        assert!(log.final_q.is_all_zero());
        assert_eq!(log.final_q.cols(), 45);
        log.validate().unwrap();
    }

    #[test]
    fn aggregated_validation() {
        let mut cfg = SessionConfig::new(Algorithm::Frac, make_profile("bored-fast").unwrap(), 5);
        cfg.steps = 0;
        cfg.learner_config.alpha = 2.0;
        cfg.user_profile.noise_std = -1.0;
        match run_session(&cfg) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cohort_needs_two_seeds() {
        let cfg = CohortConfig::new(
            vec![Algorithm::Frac],
            make_profile("indifferent").unwrap(),
            1,
            0,
        );
        assert!(matches!(run_cohort(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn identical_arms_compare_equal() {
        // the same algorithm twice sees the same seeds and so the same metrics
        let mut cfg = CohortConfig::new(
            vec![Algorithm::Frac, Algorithm::Frac],
            make_profile("bored-slow").unwrap(),
            4,
            99,
        );
        cfg.steps = 30;
        let summary = run_cohort(&cfg).unwrap();
        assert_eq!(
            summary.per_algorithm[0].mean_state,
            summary.per_algorithm[1].mean_state
        );
        for c in &summary.comparisons {
            assert_eq!(c.welch.t_statistic, 0.0);
            assert_eq!(c.welch.p_value_two_tailed, 1.0);
        }
    }
}
