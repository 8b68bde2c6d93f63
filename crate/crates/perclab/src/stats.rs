//! Statistical machinery: Kolmogorov–Smirnov tests, chi-square goodness of
//! fit, empirical transforms with standard errors, and sample summaries.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::{Error, Result};

/// Result of a Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KsResult {
    /// Max absolute distance between the compared distribution functions.
    pub statistic: f64,
    /// Asymptotic p-value with the finite-sample effective-size correction
    /// of Numerical Recipes.
    pub p_value: f64,
    /// Effective sample size `n1*n2/(n1+n2)` (or `n` for one-sample).
    pub effective_n: f64,
}

// Complement of the Kolmogorov CDF, Q(z) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 z^2},
// using the dual power series from Numerical Recipes.
fn kolmogorov_q(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let factor = (2.0 * std::f64::consts::PI).sqrt() / z;
        let t = (-std::f64::consts::PI * std::f64::consts::PI / (8.0 * z * z)).exp();
        (1.0 - factor * (t + t.powi(9) + t.powi(25) + t.powi(49))).max(0.0)
    } else {
        let t = (-2.0 * z * z).exp();
        (2.0 * (t - t.powi(4) + t.powi(9))).clamp(0.0, 1.0)
    }
}

fn ks_p_value(statistic: f64, effective_n: f64) -> f64 {
    let sqrt_n = effective_n.sqrt();
    kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic)
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    v
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KsResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("samples", "two-sample KS needs nonempty samples"));
    }
    let a = sorted_copy(xs);
    let b = sorted_copy(ys);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
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
    let effective_n = na * nb / (na + nb);
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, effective_n),
        effective_n,
    })
}

/// One-sample Kolmogorov–Smirnov test against a reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<KsResult> {
    if xs.is_empty() {
        return Err(Error::invalid("samples", "one-sample KS needs a nonempty sample"));
    }
    let a = sorted_copy(xs);
    let n = a.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in a.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
        effective_n: n,
    })
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

/// Chi-square test of observed counts against cell probabilities.
/// Probabilities must sum to 1 over the given cells.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probabilities.len() || observed.len() < 2 {
        return Err(Error::invalid("cells", "need >= 2 cells and matching lengths"));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::invalid("observed", "no observations"));
    }
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probabilities) {
        if p <= 0.0 {
            return Err(Error::invalid("probabilities", "cell probability must be positive"));
        }
        let e = total as f64 * p;
        let diff = o as f64 - e;
        stat += diff * diff / e;
    }
    let df = (observed.len() - 1) as u64;
    Ok(ChiSquareResult {
        statistic: stat,
        degrees_of_freedom: df,
        p_value: gamma_ur(df as f64 / 2.0, stat / 2.0),
    })
}

/// Quantile of an unsorted sample by linear interpolation (type 7).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let sorted = sorted_copy(xs);
    quantile_sorted(&sorted, q)
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&q));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean after discarding a fraction of each tail (5% per side).
pub fn trimmed_mean(xs: &[f64]) -> f64 {
    let sorted = sorted_copy(xs);
    let trim = (sorted.len() as f64 * 0.05).floor() as usize;
    let core = &sorted[trim..sorted.len() - trim];
    core.iter().sum::<f64>() / core.len() as f64
}

/// Quantile/trimmed-mean summary of one replica sample.
///
/// Heavy-tailed statistics are summarized by quantiles only; no plain mean
/// is reported.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSummary {
    pub count: usize,
    /// Values at the 1, 5, 25, 50, 75, 95 and 99 percent levels.
    pub percentiles: [f64; 7],
    pub trimmed_mean: f64,
}

pub const SUMMARY_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99];

impl SampleSummary {
    pub fn from_samples(xs: &[f64]) -> Result<SampleSummary> {
        if xs.is_empty() {
            return Err(Error::invalid("samples", "cannot summarize an empty sample"));
        }
        let sorted = sorted_copy(xs);
        let mut percentiles = [0.0; 7];
        for (slot, &q) in percentiles.iter_mut().zip(SUMMARY_LEVELS.iter()) {
            *slot = quantile_sorted(&sorted, q);
        }
        Ok(SampleSummary {
            count: xs.len(),
            percentiles,
            trimmed_mean: trimmed_mean(xs),
        })
    }

    pub fn median(&self) -> f64 {
        self.percentiles[3]
    }
}

/// Sample mean together with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanWithError {
    pub mean: f64,
    pub std_error: f64,
}

pub fn mean_with_error(xs: &[f64]) -> MeanWithError {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    MeanWithError {
        mean,
        std_error: (var / n).sqrt(),
    }
}

/// Empirical characteristic function at `theta`: means and standard errors
/// of the real and imaginary components.
pub fn empirical_cf(xs: &[f64], theta: f64) -> (MeanWithError, MeanWithError) {
    let mut re = Vec::with_capacity(xs.len());
    let mut im = Vec::with_capacity(xs.len());
    for &x in xs {
        let (s, c) = (theta * x).sin_cos();
        re.push(c);
        im.push(s);
    }
    (mean_with_error(&re), mean_with_error(&im))
}

/// Empirical Laplace transform `E exp(-a X)` at `a`.
pub fn empirical_laplace(xs: &[f64], a: f64) -> MeanWithError {
    let vals: Vec<f64> = xs.iter().map(|&x| (-a * x).exp()).collect();
    mean_with_error(&vals)
}

/// Empirical probability generating function `E s^Z` at `s` for
/// integer-valued samples.
pub fn empirical_pgf(zs: &[u64], s: f64) -> MeanWithError {
    let vals: Vec<f64> = zs.iter().map(|&z| s.powi(z as i32)).collect();
    mean_with_error(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_samples_distance_zero() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 1.0, 4.0, 3.0];
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn ks_known_small_values() {
        let xs = [1.0, 1.0, 4.0, 4.0];
        let ys = [1.0, 1.0, 1.0, 4.0];
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert!((r.statistic - 0.25).abs() < 1e-12);

        let xs = [0.42, 0.24, 0.86, 0.85, 0.82, 0.82, 0.25, 0.78, 0.13, 0.27];
        let ys = [0.24, 0.27, 0.87, 0.29, 0.57, 0.44, 0.5, 0.00, 0.56, 0.03];
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert!((r.statistic - 0.4).abs() < 1e-12);
    }

    #[test]
    fn ks_one_sample_uniform() {
        // Deterministic grid is as close to uniform as a sample can be.
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic < 0.001 + 1e-12);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_detects_shift() {
        let xs: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x + 0.25).collect();
        let r = ks_two_sample(&xs, &ys).unwrap();
        assert!(r.statistic > 0.2);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn chi_square_matches_reference_values() {
        // Frozen against the classical textbook computation.
        let obs = [24u64, 20, 27, 29];
        let probs = [19.0 / 100.0, 25.0 / 100.0, 26.0 / 100.0, 30.0 / 100.0];
        let r = chi_square_gof(&obs, &probs).unwrap();
        assert!((r.statistic - 2.387_584_345_479_082).abs() < 1e-9);
        assert!((r.p_value - 0.495_949_977_420_930_94).abs() < 1e-9);
    }

    #[test]
    fn quantiles_and_trimmed_mean() {
        let xs: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert!((quantile(&xs, 0.5) - 50.5).abs() < 1e-12);
        assert!((quantile(&xs, 0.0) - 1.0).abs() < 1e-12);
        assert!((quantile(&xs, 1.0) - 100.0).abs() < 1e-12);
        // Trimming 5 from each tail leaves 6..=95 with mean 50.5.
        assert!((trimmed_mean(&xs) - 50.5).abs() < 1e-12);
    }

    #[test]
    fn summary_is_ordered() {
        let xs: Vec<f64> = (0..500).map(|i| ((i * 7919) % 500) as f64).collect();
        let s = SampleSummary::from_samples(&xs).unwrap();
        for w in s.percentiles.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn empirical_transforms_on_constant_sample() {
        let xs = [2.0; 100];
        let (re, im) = empirical_cf(&xs, 0.5);
        assert!((re.mean - 1.0_f64.cos()).abs() < 1e-12);
        assert!((im.mean - 1.0_f64.sin()).abs() < 1e-12);
        assert!(re.std_error < 1e-12);
        let lap = empirical_laplace(&xs, 1.0);
        assert!((lap.mean - (-2.0_f64).exp()).abs() < 1e-12);
        let zs = [3u64; 50];
        let g = empirical_pgf(&zs, 0.5);
        assert!((g.mean - 0.125).abs() < 1e-12);
    }
}
