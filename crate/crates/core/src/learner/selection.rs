//! Probabilistic top-three selection and the recency suppression term.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::qtable::QTable;
use super::recency::RecencyTrackers;
use super::LearnerConfig;
use crate::catalog::{ActionCatalog, NUM_CATEGORIES};
use crate::error::{Error, Result};
use crate::sensing::StateId;

/// Branch probabilities for one selection draw: the three best-ranked
/// candidates, then a uniform draw over all candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionProbs {
    pub rank1: f64,
    pub rank2: f64,
    pub rank3: f64,
    pub uniform: f64,
}

impl Default for SelectionProbs {
    fn default() -> Self {
        SelectionProbs {
            rank1: 0.6,
            rank2: 0.25,
            rank3: 0.13,
            uniform: 0.02,
        }
    }
}

impl SelectionProbs {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn as_array(&self) -> [f64; 4] {
        [self.rank1, self.rank2, self.rank3, self.uniform]
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self
            .as_array()
            .iter()
            .any(|p| !(p.is_finite() && *p >= 0.0))
        {
            out.push(format!(
                "selection_probs must be finite and non-negative, got {:?}",
                self.as_array()
            ));
        }
        let sum: f64 = self.as_array().iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            out.push(format!("selection_probs must sum to 1, got {sum}"));
        }
        out
    }
}

/// Recency suppression for a category last selected `t_ca` steps ago.
///
/// Equals `c_m` right after selection and decays linearly to zero at `t_s`.
pub fn r_value(t_ca: u32, c_m: f64, t_s: u32) -> f64 {
    if t_ca >= t_s {
        0.0
    } else {
        c_m * f64::from(t_s - t_ca) / f64::from(t_s)
    }
}

/// Indices ordered by descending value; ties are in uniformly random order.
fn ranked_order<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.shuffle(rng);
    // stable sort keeps the shuffled order among equal values
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Draws one index: rank 1, 2 or 3 with the first three probabilities, or a
/// uniform pick over every index (top three included) with the last.
pub fn select_ranked<R: Rng + ?Sized>(
    values: &[f64],
    probs: &SelectionProbs,
    rng: &mut R,
) -> Result<usize> {
    if values.len() < 3 {
        return Err(Error::config(format!(
            "ranked selection needs at least 3 candidates, got {}",
            values.len()
        )));
    }
    let u: f64 = rng.random();
    let rank = if u < probs.rank1 {
        0
    } else if u < probs.rank1 + probs.rank2 {
        1
    } else if u < probs.rank1 + probs.rank2 + probs.rank3 {
        2
    } else {
        return Ok(rng.random_range(0..values.len()));
    };
    Ok(ranked_order(values, rng)[rank])
}

/// Per-category values used for ranking: Q minus recency suppression.
pub fn frac_effective_values(
    q: &QTable,
    state: StateId,
    trackers: &RecencyTrackers,
    cfg: &LearnerConfig,
) -> Vec<f64> {
    q.row(state)
        .iter()
        .zip(trackers.t_ca())
        .map(|(&v, &t)| v - r_value(t, cfg.c_m, cfg.t_s))
        .collect()
}

/// Chooses a category by ranked selection over the suppressed values, then an
/// action uniformly inside it. Returns `(category_id, action_id, effective_values)`.
pub fn select_action_frac<R: Rng + ?Sized>(
    q: &QTable,
    state: StateId,
    trackers: &RecencyTrackers,
    catalog: &ActionCatalog,
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<(usize, usize, Vec<f64>)> {
    debug_assert_eq!(q.cols(), NUM_CATEGORIES);
    let effective = frac_effective_values(q, state, trackers, cfg);
    let category_id = select_ranked(&effective, &cfg.selection_probs, rng)?;
    let actions = &catalog.category(category_id).actions;
    let action_id = actions[rng.random_range(0..actions.len())].action_id;
    Ok((category_id, action_id, effective))
}

/// Ranked selection directly over the raw per-action values of `state`.
pub fn select_action_traditional<R: Rng + ?Sized>(
    q: &QTable,
    state: StateId,
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<usize> {
    select_ranked(q.row(state), &cfg.selection_probs, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> LearnerConfig {
        LearnerConfig::default()
    }

    #[test]
    fn r_value_examples() {
        assert_eq!(r_value(0, 15.0, 3), 15.0);
        assert_eq!(r_value(1, 15.0, 3), 10.0);
        assert_eq!(r_value(2, 15.0, 3), 5.0);
        assert_eq!(r_value(3, 15.0, 3), 0.0);
        assert_eq!(r_value(u32::MAX, 15.0, 3), 0.0);
    }

    #[test]
    fn effective_values_examples() {
        let mut q = QTable::zeros(5);
        let mut trackers = RecencyTrackers::new(3);
        assert_eq!(
            frac_effective_values(&q, StateId::NEUTRAL, &trackers, &cfg()),
            vec![0.0; 5]
        );
        trackers.tick(2);
        // tick leaves selected category at 0 and the others above t_s
        assert_eq!(
            frac_effective_values(&q, StateId::NEUTRAL, &trackers, &cfg()),
            vec![0.0, 0.0, -15.0, 0.0, 0.0]
        );
        for (c, v) in [5.0, 0.0, 20.0, 0.0, 0.0].into_iter().enumerate() {
            q.set(StateId::NEUTRAL, c, v).unwrap();
        }
        assert_eq!(
            frac_effective_values(&q, StateId::NEUTRAL, &trackers, &cfg()),
            vec![5.0, 0.0, 5.0, 0.0, 0.0]
        );
    }

    #[test]
    fn too_few_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            select_ranked(&[1.0, 2.0], &SelectionProbs::default(), &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn degenerate_probs_pick_exact_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values = [3.0, 9.0, -1.0, 4.0, 8.0];
        for (probs, want) in [
            ([1.0, 0.0, 0.0, 0.0], 1),
            ([0.0, 1.0, 0.0, 0.0], 4),
            ([0.0, 0.0, 1.0, 0.0], 3),
        ] {
            let p = SelectionProbs {
                rank1: probs[0],
                rank2: probs[1],
                rank3: probs[2],
                uniform: probs[3],
            };
            for _ in 0..50 {
                assert_eq!(select_ranked(&values, &p, &mut rng).unwrap(), want);
            }
        }
    }

    #[test]
    fn selection_does_not_mutate_inputs() {
        let mut q = QTable::zeros(5);
        q.set(StateId::POSITIVE, 1, 3.5).unwrap();
        let mut trackers = RecencyTrackers::new(3);
        trackers.tick(4);
        let (q0, t0) = (q.clone(), trackers.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let catalog = ActionCatalog::default();
        for _ in 0..100 {
            select_action_frac(&q, StateId::POSITIVE, &trackers, &catalog, &cfg(), &mut rng)
                .unwrap();
        }
        assert_eq!(q, q0);
        assert_eq!(trackers, t0);
    }

    #[test]
    fn within_category_uniform() {
        // all mass on rank 1 so that category 0 (uniquely largest) is always chosen
        let mut c = cfg();
        c.selection_probs = SelectionProbs {
            rank1: 1.0,
            rank2: 0.0,
            rank3: 0.0,
            uniform: 0.0,
        };
        let mut q = QTable::zeros(5);
        q.set(StateId::NEUTRAL, 0, 1.0).unwrap();
        let trackers = RecencyTrackers::new(3);
        let catalog = ActionCatalog::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 30_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let (cat, a, _) =
                select_action_frac(&q, StateId::NEUTRAL, &trackers, &catalog, &c, &mut rng)
                    .unwrap();
            assert_eq!(cat, 0);
            counts[a] += 1;
        }
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for k in counts {
            assert!(
                (k as f64 - n as f64 / 3.0).abs() < 4.0 * sigma,
                "{counts:?}"
            );
        }
    }

    #[test]
    fn ties_broken_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values = [0.0; 5];
        let n = 50_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            counts[select_ranked(&values, &SelectionProbs::default(), &mut rng).unwrap()] += 1;
        }
        let sigma = (n as f64 * 0.2 * 0.8).sqrt();
        for k in counts {
            assert!(
                (k as f64 - n as f64 * 0.2).abs() < 4.0 * sigma,
                "{counts:?}"
            );
        }
    }
}
