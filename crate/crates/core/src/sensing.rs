//! State estimation: raw interaction observations to sub-scores, fused score
//! to one of four user states, and state to reward.
//!
//! Score tables:
//!
//! | talk length (s) | score |   | distance (cm)   | score |
//! |-----------------|-------|---|-----------------|-------|
//! | `[0, 6)`        | 0     |   | `d > 100`       | -2    |
//! | `[6, 9)`        | 1     |   | `40 <= d <= 100`| 0     |
//! | `[9, inf)`      | 2     |   | `20 < d < 40`   | +1    |
//! |                 |       |   | `d <= 20`       | +2    |
//!
//! Emotions: angry, sad, fear = -2; disgust = -1; not detected = 0;
//! neutral, surprise = +1; happy = +2.
//!
//! The fused total `s` maps to negative (`s < 0`), neutral (`s == 0`),
//! positive (`s` in 1..=2) and very positive (`s >= 3`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of distinct user states.
pub const NUM_STATES: usize = 4;

/// Estimated user feeling: 0 negative, 1 neutral, 2 positive, 3 very positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct StateId(u8);

impl StateId {
    pub const NEGATIVE: StateId = StateId(0);
    pub const NEUTRAL: StateId = StateId(1);
    pub const POSITIVE: StateId = StateId(2);
    pub const VERY_POSITIVE: StateId = StateId(3);

    pub fn new(value: u8) -> Result<Self> {
        if (value as usize) < NUM_STATES {
            Ok(StateId(value))
        } else {
            Err(Error::Reading(format!("state {value} outside 0..=3")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = StateId> {
        (0..NUM_STATES as u8).map(StateId)
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            0 => "negative",
            1 => "neutral",
            2 => "positive",
            _ => "very positive",
        }
    }
}

impl TryFrom<u8> for StateId {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        StateId::new(value)
    }
}

impl From<StateId> for u8 {
    fn from(s: StateId) -> u8 {
        s.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Facial-emotion classifier output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionLabel {
    Angry,
    Sad,
    Fear,
    Disgust,
    NotDetected,
    Neutral,
    Surprise,
    Happy,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 8] = [
        EmotionLabel::Angry,
        EmotionLabel::Sad,
        EmotionLabel::Fear,
        EmotionLabel::Disgust,
        EmotionLabel::NotDetected,
        EmotionLabel::Neutral,
        EmotionLabel::Surprise,
        EmotionLabel::Happy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::Angry => "angry",
            EmotionLabel::Sad => "sad",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::NotDetected => "not_detected",
            EmotionLabel::Neutral => "neutral",
            EmotionLabel::Surprise => "surprise",
            EmotionLabel::Happy => "happy",
        }
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmotionLabel::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = EmotionLabel::ALL.iter().map(|e| e.as_str()).collect();
                Error::Reading(format!(
                    "unknown emotion label {s:?}; expected one of {}",
                    valid.join(", ")
                ))
            })
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One post-action observation of the user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorReadings {
    pub talk_length_s: f64,
    pub distance_cm: f64,
    pub emotion: EmotionLabel,
}

impl SensorReadings {
    pub fn new(talk_length_s: f64, distance_cm: f64, emotion: EmotionLabel) -> Self {
        SensorReadings {
            talk_length_s,
            distance_cm,
            emotion,
        }
    }

    /// Collects every violated field rather than stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.talk_length_s.is_finite() && self.talk_length_s >= 0.0) {
            problems.push(format!(
                "talk_length_s must be a finite number >= 0, got {}",
                self.talk_length_s
            ));
        }
        if !(self.distance_cm.is_finite() && self.distance_cm > 0.0) {
            problems.push(format!(
                "distance_cm must be a finite number > 0, got {}",
                self.distance_cm
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Reading(problems.join("; ")))
        }
    }
}

/// Integer sub-scores and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub n_speak: i32,
    pub distance_score: i32,
    pub emotion_score: i32,
    pub total: i32,
}

/// nSpeak: 0 below 6 s, 1 in `[6, 9)`, 2 from 9 s on.
pub fn talk_score(talk_length_s: f64) -> Result<i32> {
    if !(talk_length_s.is_finite() && talk_length_s >= 0.0) {
        return Err(Error::Reading(format!(
            "talk_length_s must be a finite number >= 0, got {talk_length_s}"
        )));
    }
    Ok(if talk_length_s < 6.0 {
        0
    } else if talk_length_s < 9.0 {
        1
    } else {
        2
    })
}

/// Closer is better. The 0-band is closed at both 40 and 100 cm.
pub fn distance_score(distance_cm: f64) -> Result<i32> {
    if !(distance_cm.is_finite() && distance_cm > 0.0) {
        return Err(Error::Reading(format!(
            "distance_cm must be a finite number > 0, got {distance_cm}"
        )));
    }
    Ok(if distance_cm > 100.0 {
        -2
    } else if distance_cm >= 40.0 {
        0
    } else if distance_cm > 20.0 {
        1
    } else {
        2
    })
}

pub fn emotion_score(emotion: EmotionLabel) -> i32 {
    match emotion {
        EmotionLabel::Angry | EmotionLabel::Sad | EmotionLabel::Fear => -2,
        EmotionLabel::Disgust => -1,
        EmotionLabel::NotDetected => 0,
        EmotionLabel::Neutral | EmotionLabel::Surprise => 1,
        EmotionLabel::Happy => 2,
    }
}

/// Maps a fused integer total to a state.
pub fn state_for_total(total: i32) -> StateId {
    match total {
        t if t < 0 => StateId::NEGATIVE,
        0 => StateId::NEUTRAL,
        1 | 2 => StateId::POSITIVE,
        _ => StateId::VERY_POSITIVE,
    }
}

pub fn fuse_state(readings: &SensorReadings) -> Result<(ScoreBreakdown, StateId)> {
    readings.validate()?;
    let n_speak = talk_score(readings.talk_length_s)?;
    let distance_score = distance_score(readings.distance_cm)?;
    let emotion_score = emotion_score(readings.emotion);
    let total = n_speak + distance_score + emotion_score;
    let scores = ScoreBreakdown {
        n_speak,
        distance_score,
        emotion_score,
        total,
    };
    Ok((scores, state_for_total(total)))
}

pub fn reward_for_state(state: StateId) -> f64 {
    match state.value() {
        0 => -10.0,
        1 => -5.0,
        2 => 5.0,
        _ => 10.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn talk_bands() {
        assert_eq!(talk_score(0.0).unwrap(), 0);
        assert_eq!(talk_score(5.999).unwrap(), 0);
        assert_eq!(talk_score(6.0).unwrap(), 1);
        assert_eq!(talk_score(7.5).unwrap(), 1);
        assert_eq!(talk_score(9.0).unwrap(), 2);
        assert_eq!(talk_score(120.0).unwrap(), 2);
        assert!(talk_score(-0.1).is_err());
        assert!(talk_score(f64::NAN).is_err());
    }

    #[test]
    fn distance_bands() {
        assert_eq!(distance_score(120.0).unwrap(), -2);
        assert_eq!(distance_score(100.5).unwrap(), -2);
        assert_eq!(distance_score(100.0).unwrap(), 0);
        assert_eq!(distance_score(40.0).unwrap(), 0);
        assert_eq!(distance_score(39.9).unwrap(), 1);
        assert_eq!(distance_score(20.01).unwrap(), 1);
        assert_eq!(distance_score(20.0).unwrap(), 2);
        assert_eq!(distance_score(15.0).unwrap(), 2);
        assert!(distance_score(0.0).is_err());
        assert!(distance_score(-3.0).is_err());
    }

    #[test]
    fn emotion_table() {
        let expected = [-2, -2, -2, -1, 0, 1, 1, 2];
        for (e, want) in EmotionLabel::ALL.iter().zip(expected) {
            assert_eq!(emotion_score(*e), want, "{e}");
        }
    }

    #[test]
    fn emotion_parse() {
        for e in EmotionLabel::ALL {
            assert_eq!(e.as_str().parse::<EmotionLabel>().unwrap(), e);
            let json = serde_json::to_string(&e).unwrap();
            assert_eq!(json, format!("\"{}\"", e.as_str()));
        }
        assert!("bored".parse::<EmotionLabel>().is_err());
    }

    #[test]
    fn fuse_examples() {
        let (s, st) = fuse_state(&SensorReadings::new(9.5, 30.0, EmotionLabel::Happy)).unwrap();
        assert_eq!(
            (s.n_speak, s.distance_score, s.emotion_score, s.total),
            (2, 1, 2, 5)
        );
        assert_eq!(st, StateId::VERY_POSITIVE);

        let (s, st) = fuse_state(&SensorReadings::new(0.0, 120.0, EmotionLabel::Sad)).unwrap();
        assert_eq!(s.total, -4);
        assert_eq!(st, StateId::NEGATIVE);

        let (s, st) =
            fuse_state(&SensorReadings::new(0.0, 50.0, EmotionLabel::NotDetected)).unwrap();
        assert_eq!(s.total, 0);
        assert_eq!(st, StateId::NEUTRAL);
    }

    #[test]
    fn fuse_rejects_bad_readings() {
        let err = fuse_state(&SensorReadings::new(-1.0, 0.0, EmotionLabel::Happy)).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("talk_length_s") && msg.contains("distance_cm"),
            "{msg}"
        );
    }

    #[test]
    fn rewards() {
        let got: Vec<f64> = StateId::all().map(reward_for_state).collect();
        assert_eq!(got, vec![-10.0, -5.0, 5.0, 10.0]);
    }

    #[test]
    fn state_id_range() {
        assert!(StateId::new(4).is_err());
        assert!(serde_json::from_str::<StateId>("7").is_err());
        assert_eq!(
            serde_json::from_str::<StateId>("2").unwrap(),
            StateId::POSITIVE
        );
    }

    proptest! {
        #[test]
        fn fused_total_in_range(talk in 0.0f64..60.0, dist in 0.01f64..500.0, e in 0usize..8) {
            let r = SensorReadings::new(talk, dist, EmotionLabel::ALL[e]);
            let (s, st) = fuse_state(&r).unwrap();
            prop_assert!((-4..=6).contains(&s.total));
            prop_assert_eq!(s.total, s.n_speak + s.distance_score + s.emotion_score);
            prop_assert_eq!(st, state_for_total(s.total));
            prop_assert_eq!(fuse_state(&r).unwrap(), (s, st));
        }

        #[test]
        fn talk_monotone(a in 0.0f64..30.0, b in 0.0f64..30.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(talk_score(lo).unwrap() <= talk_score(hi).unwrap());
        }

        #[test]
        fn distance_non_increasing(a in 0.01f64..300.0, b in 0.01f64..300.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(distance_score(lo).unwrap() >= distance_score(hi).unwrap());
        }
    }
}
