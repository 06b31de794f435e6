//! Synthetic participants.
//!
//! Each category has a fixed affinity and a fluctuating interest. Presenting a
//! category satiates it, resting lets it recover. Engagement
//! `e = clamp(affinity[c] * interest[c] + noise, 0, 1)` is turned into
//! readings that span all four states: `e = 0` lands in the worst scoring
//! bands and `e = 1` in the best.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog::NUM_CATEGORIES;
use crate::error::{Error, Result};
use crate::sensing::{EmotionLabel, SensorReadings};

/// Talk length at full engagement, seconds.
pub const MAX_TALK_S: f64 = 12.0;
/// Distance at zero engagement, centimeters.
pub const FAR_CM: f64 = 120.0;
/// Distance closed at full engagement: 120 cm down to 15 cm.
pub const APPROACH_CM: f64 = 105.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserProfile {
    pub base_affinity: [f64; NUM_CATEGORIES],
    /// Interest lost by a category each time it is presented.
    pub satiation_rate: f64,
    /// Interest regained by every other category per step.
    pub recovery_rate: f64,
    /// Extra satiation when the exact same action is repeated.
    pub repeat_action_penalty: f64,
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

const PRESETS: [(&str, &str); 4] = [
    (
        "static-enthusiast",
        include_str!("../profiles/static-enthusiast.json"),
    ),
    ("bored-fast", include_str!("../profiles/bored-fast.json")),
    ("bored-slow", include_str!("../profiles/bored-slow.json")),
    ("indifferent", include_str!("../profiles/indifferent.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn make_profile(preset_name: &str) -> Result<UserProfile> {
    let (_, json) = PRESETS
        .iter()
        .find(|(n, _)| *n == preset_name)
        .ok_or_else(|| Error::UnknownPreset {
            name: preset_name.to_string(),
            valid: preset_names(),
        })?;
    let profile: UserProfile = serde_json::from_str(json)?;
    profile.validate()?;
    Ok(profile)
}

impl UserProfile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: UserProfile = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// A preset name, or else a path to a JSON profile.
    pub fn from_preset_or_file(name_or_path: &str) -> Result<Self> {
        match make_profile(name_or_path) {
            Err(Error::UnknownPreset { .. }) if Path::new(name_or_path).exists() => Self::load(name_or_path),
            other => other,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn problems(&self) -> Vec<String> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let mut out = Vec::new();
        if !self.base_affinity.iter().all(|&a| unit(a)) {
            out.push(format!(
                "base_affinity entries must be in [0, 1], got {:?}",
                self.base_affinity
            ));
        }
        for (name, v) in [
            ("satiation_rate", self.satiation_rate),
            ("recovery_rate", self.recovery_rate),
            ("repeat_action_penalty", self.repeat_action_penalty),
        ] {
            if !unit(v) {
                out.push(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            out.push(format!("noise_std must be >= 0, got {}", self.noise_std));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserState {
    pub interest: [f64; NUM_CATEGORIES],
    pub last_action_id: Option<usize>,
    pub steps_elapsed: u64,
}

impl Default for UserState {
    fn default() -> Self {
        UserState {
            interest: [1.0; NUM_CATEGORIES],
            last_action_id: None,
            steps_elapsed: 0,
        }
    }
}

/// Engagement ladder for facial emotion.
pub fn emotion_for_engagement(e: f64) -> EmotionLabel {
    if e < 0.2 {
        EmotionLabel::Sad
    } else if e < 0.35 {
        EmotionLabel::Disgust
    } else if e < 0.5 {
        EmotionLabel::NotDetected
    } else if e < 0.7 {
        EmotionLabel::Neutral
    } else if e < 0.85 {
        EmotionLabel::Surprise
    } else {
        EmotionLabel::Happy
    }
}

pub fn readings_for_engagement(e: f64) -> SensorReadings {
    SensorReadings {
        talk_length_s: MAX_TALK_S * e,
        distance_cm: FAR_CM - APPROACH_CM * e,
        emotion: emotion_for_engagement(e),
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedUser {
    profile: UserProfile,
    state: UserState,
    rng: ChaCha8Rng,
}

impl SimulatedUser {
    pub fn new(profile: UserProfile) -> Result<Self> {
        profile.validate()?;
        Ok(SimulatedUser {
            rng: ChaCha8Rng::seed_from_u64(profile.seed),
            state: UserState::default(),
            profile,
        })
    }

    pub fn profile(&self) -> &UserProfile {
        &self.profile
    }

    pub fn state(&self) -> &UserState {
        &self.state
    }

    /// Engagement for `category_id` given the current interest, before noise.
    pub fn mean_engagement(&self, category_id: usize) -> f64 {
        (self.profile.base_affinity[category_id] * self.state.interest[category_id]).clamp(0.0, 1.0)
    }

    pub fn respond(&mut self, category_id: usize, action_id: usize) -> SensorReadings {
        assert!(
            category_id < NUM_CATEGORIES,
            "category {category_id} out of range"
        );
        let p = &self.profile;
        let mut e = p.base_affinity[category_id] * self.state.interest[category_id];
        if p.noise_std > 0.0 {
            let noise = Normal::new(0.0, p.noise_std).expect("noise_std validated");
            e += noise.sample(&mut self.rng);
        }
        let readings = readings_for_engagement(e.clamp(0.0, 1.0));

        let mut loss = p.satiation_rate;
        if self.state.last_action_id == Some(action_id) {
            loss += p.repeat_action_penalty;
        }
        for (j, interest) in self.state.interest.iter_mut().enumerate() {
            let next = if j == category_id {
                *interest - loss
            } else {
                *interest + p.recovery_rate
            };
            *interest = next.clamp(0.0, 1.0);
        }
        self.state.last_action_id = Some(action_id);
        self.state.steps_elapsed += 1;
        readings
    }
}

/// Free-function form of [`SimulatedUser::respond`].
pub fn respond(user: &mut SimulatedUser, category_id: usize, action_id: usize) -> SensorReadings {
    user.respond(category_id, action_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{fuse_state, StateId};
    use proptest::prelude::*;

    fn static_user() -> SimulatedUser {
        SimulatedUser::new(make_profile("static-enthusiast").unwrap()).unwrap()
    }

    #[test]
    fn static_user_preferred_category() {
        let mut u = static_user();
        let r = u.respond(2, 10);
        assert_eq!(r, SensorReadings::new(12.0, 15.0, EmotionLabel::Happy));
        assert_eq!(fuse_state(&r).unwrap().1, StateId::VERY_POSITIVE);
    }

    #[test]
    fn static_user_other_category() {
        let mut u = static_user();
        let r = u.respond(0, 1);
        assert_eq!(r, SensorReadings::new(0.0, 120.0, EmotionLabel::Sad));
        assert_eq!(fuse_state(&r).unwrap().1, StateId::NEGATIVE);
    }

    #[test]
    fn static_user_is_memoryless() {
        let mut u = static_user();
        let first: Vec<_> = (0..5).map(|c| u.respond(c, c)).collect();
        for _ in 0..10 {
            for c in [2, 2, 0, 4] {
                assert_eq!(u.respond(c, 7), first[c]);
            }
        }
    }

    #[test]
    fn boredom_user_satiates() {
        let profile = UserProfile {
            base_affinity: [0.0, 0.0, 1.0, 0.0, 0.0],
            satiation_rate: 0.25,
            recovery_rate: 0.05,
            repeat_action_penalty: 0.0,
            noise_std: 0.0,
            seed: 0,
        };
        let mut u = SimulatedUser::new(profile).unwrap();
        let mut interest = vec![u.state().interest[2]];
        let mut states = Vec::new();
        for i in 0..4 {
            let r = u.respond(2, 10 + i);
            states.push(fuse_state(&r).unwrap().1);
            interest.push(u.state().interest[2]);
        }
        assert_eq!(interest, vec![1.0, 0.75, 0.5, 0.25, 0.0]);
        assert!(states.windows(2).all(|w| w[0] >= w[1]), "{states:?}");
        assert_eq!(states[0], StateId::VERY_POSITIVE);
        assert_eq!(states[3], StateId::NEGATIVE);
    }

    #[test]
    fn repeat_action_penalty_applies() {
        let mut p = make_profile("bored-fast").unwrap();
        p.noise_std = 0.0;
        let mut u = SimulatedUser::new(p).unwrap();
        u.respond(2, 10);
        u.respond(2, 10);
        assert!((u.state().interest[2] - (1.0 - 0.25 - 0.35)).abs() < 1e-12);
    }

    #[test]
    fn presets() {
        let se = make_profile("static-enthusiast").unwrap();
        assert_eq!(se.satiation_rate, 0.0);
        assert_eq!(se.base_affinity.iter().filter(|&&a| a > 0.5).count(), 1);
        let bf = make_profile("bored-fast").unwrap();
        assert_eq!((bf.satiation_rate, bf.recovery_rate), (0.25, 0.05));
        for name in preset_names() {
            make_profile(name).unwrap();
        }
        match make_profile("unknown") {
            Err(e @ Error::UnknownPreset { .. }) => {
                let msg = e.to_string();
                assert!(
                    msg.contains("bored-fast") && msg.contains("indifferent"),
                    "{msg}"
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bored_fast_degrades_without_rotation() {
        // a policy that never rotates loses the user well within 20 steps
        let mut p = make_profile("bored-fast").unwrap();
        p.seed = 17;
        let mut u = SimulatedUser::new(p).unwrap();
        let states: Vec<_> = (0..20)
            .map(|_| fuse_state(&u.respond(2, 10)).unwrap().1)
            .collect();
        assert_eq!(states[0], StateId::VERY_POSITIVE);
        assert!(
            states[4..].iter().all(|&s| s == StateId::NEGATIVE),
            "{states:?}"
        );
    }

    #[test]
    fn rejects_bad_profile() {
        let p = UserProfile {
            base_affinity: [1.5, 0.0, 0.0, 0.0, 0.0],
            satiation_rate: -0.1,
            recovery_rate: 0.0,
            repeat_action_penalty: 0.0,
            noise_std: -1.0,
            seed: 0,
        };
        match SimulatedUser::new(p) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn interest_stays_clamped(
            sat in 0.0f64..=1.0, rec in 0.0f64..=1.0, rep in 0.0f64..=1.0,
            noise in 0.0f64..0.5, seed in any::<u64>(),
            choices in proptest::collection::vec((0usize..5, 0usize..45), 1..80),
        ) {
            let p = UserProfile {
                base_affinity: [0.3, 0.9, 1.0, 0.0, 0.6],
                satiation_rate: sat, recovery_rate: rec, repeat_action_penalty: rep,
                noise_std: noise, seed,
            };
            let mut u = SimulatedUser::new(p.clone()).unwrap();
            let mut twin = SimulatedUser::new(p).unwrap();
            for &(c, a) in &choices {
                let r = u.respond(c, a);
                prop_assert!(r.validate().is_ok());
                prop_assert_eq!(r, twin.respond(c, a));
                prop_assert!(u.state().interest.iter().all(|i| (0.0..=1.0).contains(i)));
            }
        }

        #[test]
        fn repetition_never_raises_engagement(cat in 0usize..5, n in 1usize..30) {
            let p = UserProfile {
                base_affinity: [0.8; 5], satiation_rate: 0.1, recovery_rate: 0.05,
                repeat_action_penalty: 0.0, noise_std: 0.0, seed: 0,
            };
            let mut u = SimulatedUser::new(p).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..n {
                let e = u.mean_engagement(cat);
                prop_assert!(e <= prev);
                prev = e;
                let other = (cat + 1) % 5;
                let before = u.state().interest[other];
                u.respond(cat, i);
                prop_assert!(u.state().interest[other] >= before);
            }
        }
    }
}
