//! Goodness-of-fit statistics used by the sampler checks and the statistical
//! battery: Kolmogorov-Smirnov (one- and two-sample) and Pearson chi-squared.

use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = libm::exp(-2.0 * j * j * lambda * lambda);
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let en = effective_n.sqrt();
    kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
}

/// Two-sample KS test; ties are stepped over together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestResult {
    assert!(!a.is_empty() && !b.is_empty(), "empty sample");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    TestResult {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
    }
}

/// One-sample KS test of integer data against a discrete CDF.
///
/// The p-value uses the continuous Kolmogorov limit, which is conservative
/// for discrete nulls.
pub fn ks_one_sample_discrete(samples: &[i64], cdf: impl Fn(i64) -> f64) -> TestResult {
    assert!(!samples.is_empty(), "empty sample");
    let mut s = samples.to_vec();
    s.sort_unstable();
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut below = 0.0;
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        // Just before the jump at x the empirical CDF still equals `below`.
        d = d.max((below - cdf(x - 1)).abs());
        while i < s.len() && s[i] == x {
            i += 1;
        }
        below = i as f64 / n;
        d = d.max((below - cdf(x)).abs());
    }
    TestResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}

/// Pearson chi-squared against explicit expected probabilities.
pub fn chi_squared(counts: &[u64], probs: &[f64]) -> TestResult {
    assert_eq!(counts.len(), probs.len());
    assert!(counts.len() >= 2);
    let total: u64 = counts.iter().sum();
    let total = total as f64;
    let statistic: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * total;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let df = (counts.len() - 1) as f64;
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    TestResult {
        statistic,
        p_value: dist.sf(statistic),
    }
}

pub fn chi_squared_uniform(counts: &[u64]) -> TestResult {
    let p = 1.0 / counts.len() as f64;
    chi_squared(counts, &vec![p; counts.len()])
}

/// Total variation distance between an empirical histogram and a pmf.
pub fn total_variation(counts: &[u64], probs: &[f64]) -> f64 {
    let total = counts.iter().sum::<u64>() as f64;
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / total - p).abs())
        .sum::<f64>()
        / 2.0
}
