//! Distributional law checks for tree growth, marking, the urn, and the
//! cluster decomposition at simulation scale.

use perclab::experiments::parallel_replicas;
use perclab::percolation::{decompose, percolate_counts, percolate_streaming};
use perclab::stats::{ks_two_sample, mean_with_error};
use perclab::tree::{exact_mean_root_fraction, urn_black_count, MarkOrder, MarkedTree};

/// The two mark orders induce the same joint law: two-sample tests on the
/// functionals (G_n, Δ_n) must not reject at level 1e-3.
#[test]
fn mark_orders_agree_in_law() {
    let n = 1000u64;
    let p = 0.85;
    let reps = 10_000u64;
    let draw = |order: MarkOrder, salt: u64| -> Vec<(f64, f64)> {
        parallel_replicas(1800 + salt, reps, None, |_, rng| {
            let m = MarkedTree::sample(n, p, rng, order)?;
            let d = decompose(&m, None)?;
            Ok((d.root_cluster_size as f64, d.disconnected as f64))
        })
        .unwrap()
    };
    let during = draw(MarkOrder::DuringGrowth, 0);
    let after = draw(MarkOrder::AfterGrowth, 1);
    let g_d: Vec<f64> = during.iter().map(|x| x.0).collect();
    let g_a: Vec<f64> = after.iter().map(|x| x.0).collect();
    let ks_g = ks_two_sample(&g_d, &g_a).unwrap();
    assert!(ks_g.p_value > 1e-3, "G two-sample rejected: {ks_g:?}");
    let d_d: Vec<f64> = during.iter().map(|x| x.1).collect();
    let d_a: Vec<f64> = after.iter().map(|x| x.1).collect();
    let ks_d = ks_two_sample(&d_d, &d_a).unwrap();
    assert!(ks_d.p_value > 1e-3, "Δ two-sample rejected: {ks_d:?}");
}

/// Monte Carlo mean of G_n/n against the exact finite-n identity at
/// n = 10^6, c = 1. Not an asymptotic: the identity is exact for every n.
#[test]
fn law_of_large_numbers_at_one_million() {
    let n = 1_000_000u64;
    let c = 1.0;
    let p = 1.0 - c / (n as f64).ln();
    let reps = 400u64;
    let fractions = parallel_replicas(1801, reps, None, |_, rng| {
        Ok(percolate_counts(n, p, rng, None)?.root_cluster_size as f64 / n as f64)
    })
    .unwrap();
    let est = mean_with_error(&fractions);
    let exact = exact_mean_root_fraction(n, p).unwrap();
    assert!(
        (est.mean - exact).abs() <= 4.0 * est.std_error,
        "mean {} vs exact {exact} (se {})",
        est.mean,
        est.std_error
    );
}

/// Urn black count has exactly the law of Δ_n (tree-percolation oracle).
#[test]
fn urn_equals_delta_in_law() {
    let n = 2000u64;
    let p = 0.8;
    let reps = 10_000u64;
    let urn = parallel_replicas(1802, reps, None, |_, rng| {
        Ok(urn_black_count(n, p, rng)? as f64)
    })
    .unwrap();
    let tree = parallel_replicas(1803, reps, None, |_, rng| {
        Ok(percolate_counts(n, p, rng, None)?.disconnected as f64)
    })
    .unwrap();
    let ks = ks_two_sample(&urn, &tree).unwrap();
    assert!(ks.p_value > 1e-3, "urn vs tree rejected: {ks:?}");
}

/// Mean number of clusters of size > x n/ln n approaches the tail
/// c e^{-c}/x of the Poisson cluster measure; the discrepancy shrinks from
/// n = 10^4 to n = 10^6 (the convergence is logarithmically slow).
#[test]
fn cluster_count_tail_trend() {
    let c = 1.0f64;
    let x = 1.0f64;
    let target = c * (-c).exp() / x;
    let count_mean = |n: u64, reps: u64, salt: u64| -> f64 {
        let p = 1.0 - c / (n as f64).ln();
        let cutoff = x * n as f64 / (n as f64).ln();
        let counts = parallel_replicas(1804 + salt, reps, None, |_, rng| {
            let d = percolate_streaming(n, p, rng, None)?;
            Ok(d.ranked_sizes.iter().take_while(|&&s| s as f64 > cutoff).count() as f64)
        })
        .unwrap();
        mean_with_error(&counts).mean
    };
    let small = count_mean(10_000, 4000, 0);
    let large = count_mean(1_000_000, 1000, 1);
    let err_small = (small - target).abs();
    let err_large = (large - target).abs();
    assert!(
        err_large < 0.25 * target,
        "mean cluster count {large} vs {target} off by more than 25%"
    );
    assert!(
        err_large < err_small,
        "no improvement: {err_small} -> {err_large}"
    );
}

/// Prefix-mutant boundary cases at simulation scale.
#[test]
fn prefix_mutants_boundaries() {
    let reps = 200u64;
    let results = parallel_replicas(1805, reps, None, |_, rng| {
        let n = 500;
        let full = percolate_counts(n, 0.7, rng, Some(n))?;
        Ok((full.prefix_mutants.unwrap(), full.disconnected))
    })
    .unwrap();
    for (prefix, delta) in results {
        assert_eq!(prefix, delta);
    }
    let ones = parallel_replicas(1806, reps, None, |_, rng| {
        Ok(percolate_counts(500, 0.7, rng, Some(1))?.prefix_mutants.unwrap())
    })
    .unwrap();
    assert!(ones.into_iter().all(|m| m == 0));
}
