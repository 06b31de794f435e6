use fracq_core::stats::{
    student_t_cdf, student_t_two_tailed, welch_test, welch_test_samples, GroupSummary,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal};

#[test]
fn t_cdf_matches_sampled_distribution() {
    let n = 1_000_000;
    let points = [-3.0, -1.5, -0.5, 0.0, 0.7, 2.0, 4.0];
    for (i, df) in [1.0f64, 5.0, 8.0, 30.0].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
        let z = Normal::new(0.0, 1.0).unwrap();
        let chi = ChiSquared::new(df).unwrap();
        let mut below = [0usize; 7];
        for _ in 0..n {
            let t: f64 = z.sample(&mut rng) / (chi.sample(&mut rng) / df).sqrt();
            for (k, &p) in points.iter().enumerate() {
                below[k] += usize::from(t <= p);
            }
        }
        for (k, &p) in points.iter().enumerate() {
            let cdf = student_t_cdf(p, df);
            let empirical = below[k] as f64 / n as f64;
            let se = (cdf * (1.0 - cdf) / n as f64).sqrt();
            assert!(
                (empirical - cdf).abs() <= 3.0 * se + 1e-12,
                "df {df} t {p}: {empirical} vs {cdf}"
            );
        }
    }
}

#[test]
fn two_tailed_is_symmetric_tail_mass() {
    for df in [1.0f64, 2.5, 7.0, 60.0] {
        for t in [0.1, 1.0, 2.2, 5.0] {
            let lower = student_t_cdf(-t, df);
            assert!((student_t_two_tailed(t, df) - 2.0 * lower).abs() < 1e-12);
            assert!((student_t_two_tailed(-t, df) - student_t_two_tailed(t, df)).abs() < 1e-15);
        }
    }
}

#[test]
fn samples_and_summaries_agree() {
    let a = [3.1, 2.4, 2.9, 3.3, 1.8, 2.2, 2.7];
    let b = [1.1, 0.4, 2.2, 1.7, 0.9];
    let from_samples = welch_test_samples(&a, &b).unwrap();
    let (sa, sb) = (
        GroupSummary::from_samples(&a),
        GroupSummary::from_samples(&b),
    );
    let from_summary = welch_test(sa.mean, sa.sd, sa.n, sb.mean, sb.sd, sb.n).unwrap();
    assert!((from_samples.t_statistic - from_summary.t_statistic).abs() < 1e-12);
    assert!((from_samples.p_value_two_tailed - from_summary.p_value_two_tailed).abs() < 1e-12);
}

#[test]
fn welch_rejects_degenerate_groups() {
    assert!(welch_test(1.0, 1.0, 1, 0.0, 1.0, 5).is_err());
    assert!(welch_test(1.0, -0.1, 5, 0.0, 1.0, 5).is_err());
    assert!(welch_test_samples(&[1.0], &[1.0, 2.0]).is_err());
}
