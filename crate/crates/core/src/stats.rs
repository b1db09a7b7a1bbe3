//! Hypothesis tests and confidence bounds used by the experiments.

use statrs::distribution::{Beta, Binomial, ChiSquared, ContinuousCDF, DiscreteCDF, Normal};

/// Upper-tail p-value of Pearson's goodness-of-fit statistic. Cells with zero
/// expectation are skipped; degrees of freedom are `cells - 1 - fitted`.
pub fn chi_square_p_fitted(observed: &[usize], expected: &[f64], fitted: usize) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            if o > 0 {
                return 0.0;
            }
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = cells.saturating_sub(1 + fitted);
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    dist.sf(stat)
}

pub fn chi_square_p(observed: &[usize], expected: &[f64]) -> f64 {
    chi_square_p_fitted(observed, expected, 0)
}

/// Exact two-sided binomial test p-value (doubled smaller tail, capped at 1).
pub fn binomial_two_sided_p(successes: u64, trials: u64, p: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let dist = Binomial::new(p, trials).expect("valid binomial");
    let lower = dist.cdf(successes);
    let upper = if successes == 0 { 1.0 } else { dist.sf(successes - 1) };
    (2.0 * lower.min(upper)).min(1.0)
}

/// One-sided Clopper-Pearson upper confidence bound for a binomial proportion.
pub fn clopper_pearson_upper(successes: u64, trials: u64, confidence: f64) -> f64 {
    assert!(trials > 0);
    if successes >= trials {
        return 1.0;
    }
    let k = successes as f64;
    let n = trials as f64;
    Beta::new(k + 1.0, n - k)
        .expect("valid beta")
        .inverse_cdf(confidence)
}

/// Two-sided Wilson score interval at the given confidence.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0);
    let z = normal_quantile(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn normal_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(q)
}

/// Empirical quantile by the nearest-rank rule on sorted data.
pub fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> T {
    assert!(!sorted.is_empty());
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}
