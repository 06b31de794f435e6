//! Welch's unequal-variance t-test and the special functions behind it.
//!
//! The Student-t CDF goes through the regularized incomplete beta function,
//! evaluated by its continued fraction with the modified Lentz algorithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for `I_x(a, b)`, valid where `x < (a + 1) / (a + b + 2)`.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 10_000;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        // even step
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        // odd step
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`. NaN outside the domain.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// Student-t cumulative distribution function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 1.0;
    }
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    let tail = 0.5 * student_t_two_tailed(t, df);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t_statistic: f64,
    /// Welch–Satterthwaite approximation.
    pub degrees_of_freedom: f64,
    pub p_value_two_tailed: f64,
}

/// Summary statistics of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl GroupSummary {
    /// Mean and sample (n - 1) standard deviation.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = mean(samples);
        let sd = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        GroupSummary { mean, sd, n }
    }
}

pub fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Welch's t-test from per-group mean, standard deviation and size.
///
/// With both standard deviations zero the statistic is undefined; by
/// convention equal means give `t = 0, p = 1` and different means give
/// `t = ±inf, p = 0`, both with `df = n_a + n_b - 2`.
pub fn welch_test(
    mean_a: f64,
    sd_a: f64,
    n_a: usize,
    mean_b: f64,
    sd_b: f64,
    n_b: usize,
) -> Result<WelchResult> {
    let mut problems = Vec::new();
    if n_a < 2 || n_b < 2 {
        problems.push(format!("each group needs n >= 2, got {n_a} and {n_b}"));
    }
    if !(sd_a >= 0.0 && sd_b >= 0.0 && sd_a.is_finite() && sd_b.is_finite()) {
        problems.push(format!(
            "standard deviations must be finite and >= 0, got {sd_a} and {sd_b}"
        ));
    }
    if !(mean_a.is_finite() && mean_b.is_finite()) {
        problems.push("means must be finite".to_string());
    }
    if !problems.is_empty() {
        return Err(Error::Stats(problems.join("; ")));
    }

    let (na, nb) = (n_a as f64, n_b as f64);
    let diff = mean_a - mean_b;
    let va = sd_a * sd_a / na;
    let vb = sd_b * sd_b / nb;
    if va + vb == 0.0 {
        let (t, p) = if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, 0.0)
        };
        return Ok(WelchResult {
            t_statistic: t,
            degrees_of_freedom: na + nb - 2.0,
            p_value_two_tailed: p,
        });
    }

    let t = diff / (va + vb).sqrt();
    let df = if va == vb && n_a == n_b {
        // pooled case; avoids rounding in the general formula
        na + nb - 2.0
    } else {
        (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0))
    };
    Ok(WelchResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value_two_tailed: student_t_two_tailed(t, df),
    })
}

pub fn welch_test_summaries(a: &GroupSummary, b: &GroupSummary) -> Result<WelchResult> {
    welch_test(a.mean, a.sd, a.n, b.mean, b.sd, b.n)
}

/// Welch's t-test on raw samples (sample standard deviations).
pub fn welch_test_samples(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    welch_test_summaries(
        &GroupSummary::from_samples(a),
        &GroupSummary::from_samples(b),
    )
}
