//! Law-level checks for root isolation: near-linear growth of the
//! disconnection count, the clock window around the percolation cutoff,
//! and the germ's exact first moment.

use perclab::experiments::parallel_replicas;
use perclab::isolation::{
    germ_delta, meir_moon_distributional, percolation_schedule, GermParams, GermRoute,
};
use perclab::stats::mean_with_error;
use perclab::tree::exact_mean_root_fraction;

/// Near-linear growth: for l = floor(k / ln^2 k), the replica fraction
/// with D_k(l) / (l ln^2 l) above a fixed epsilon falls as k grows.
#[test]
fn disconnection_grows_nearly_linearly() {
    let epsilon = 0.15;
    let fraction_above = |k: u64, salt: u64| -> f64 {
        let ln2 = (k as f64).ln().powi(2);
        let l = (k as f64 / ln2).floor() as usize;
        let reps = 3000u64;
        let hits = parallel_replicas(1900 + salt, reps, None, |_, rng| {
            let run = perclab::isolation::coupled_walk_isolation(k, rng)?;
            let d = run.trace.disconnected_after(l.min(run.trace.cuts.len())) as f64;
            let lf = l as f64;
            Ok(u64::from(d / (lf * lf.ln().powi(2)) > epsilon))
        })
        .unwrap();
        hits.iter().sum::<u64>() as f64 / reps as f64
    };
    let f4 = fraction_above(10_000, 0);
    let f5 = fraction_above(100_000, 1);
    let f6 = fraction_above(1_000_000, 2);
    assert!(f5 < f4, "no decrease: {f4} -> {f5}");
    assert!(f6 < f5, "no decrease: {f5} -> {f6}");
}

/// Clock window: with alpha = 0.7, the frequency of
/// rho(c k^{3/4} - k^a) <= t_k <= rho(c k^{3/4} + k^a) climbs toward one.
/// Window misses are heavy-tail events of order k^{-1/4}, so the ladder
/// uses moderate k (where misses are common enough to count) and enough
/// replicas to keep the rate gaps several sigma wide.
#[test]
fn cutoff_window_frequency_increases() {
    let c = 1.0f64;
    let alpha = 0.7f64;
    let window_rate = |k: u64, salt: u64| -> f64 {
        let params = GermParams::standalone(k, c).unwrap();
        let lo = (c * (k as f64).powf(0.75) - (k as f64).powf(alpha)).floor() as usize;
        let hi = (c * (k as f64).powf(0.75) + (k as f64).powf(alpha)).floor() as usize;
        let reps = 8000u64;
        let hits = parallel_replicas(1910 + salt, reps, None, |_, rng| {
            let trace = meir_moon_distributional(k, rng);
            let timed = percolation_schedule(&trace, rng);
            let times = timed.times.as_ref().unwrap();
            // rho is +infinity once the root is isolated
            let rho = |l: usize| -> f64 {
                if l == 0 {
                    0.0
                } else if l <= times.len() {
                    times[l - 1]
                } else {
                    f64::INFINITY
                }
            };
            Ok(u64::from(rho(lo) <= params.cutoff && params.cutoff <= rho(hi)))
        })
        .unwrap();
        hits.iter().sum::<u64>() as f64 / reps as f64
    };
    let f1 = window_rate(4096, 0);
    let f2 = window_rate(32_768, 1);
    let f3 = window_rate(262_144, 2);
    assert!(f1 < f2 && f2 < f3, "window rates not increasing: {f1} {f2} {f3}");
    assert!(f3 > 0.98, "window rate at k=2^18 only {f3}");
}

/// Germ first moment: E Δ_k = k (1 - E(G_k/k)) with the exact product
/// oracle, for both realization routes.
#[test]
fn germ_mean_matches_exact_oracle_at_ten_thousand() {
    let k = 10_000u64;
    let params = GermParams::standalone(k, 1.0).unwrap();
    let exact = exact_mean_root_fraction(k, params.survival).unwrap();
    let target = k as f64 * (1.0 - exact);
    for (route, salt) in [(GermRoute::ClockCutoff, 0u64), (GermRoute::DirectPercolation, 1)] {
        let draws = parallel_replicas(1920 + salt, 4000, None, |_, rng| {
            Ok(germ_delta(&params, rng, route)? as f64)
        })
        .unwrap();
        let est = mean_with_error(&draws);
        assert!(
            (est.mean - target).abs() <= 4.0 * est.std_error,
            "route {route:?}: mean {} vs {target} (se {})",
            est.mean,
            est.std_error
        );
    }
}

/// Pipeline-mode germ (q = 1 - c/ln n at size k = floor(ln^4 n)) also
/// matches its exact first moment.
#[test]
fn pipeline_germ_mean_matches_exact_oracle() {
    let params = GermParams::pipeline(100_000, 1.0).unwrap();
    let exact = exact_mean_root_fraction(params.k, params.survival).unwrap();
    let target = params.k as f64 * (1.0 - exact);
    let draws = parallel_replicas(1930, 3000, None, |_, rng| {
        Ok(germ_delta(&params, rng, GermRoute::ClockCutoff)? as f64)
    })
    .unwrap();
    let est = mean_with_error(&draws);
    assert!(
        (est.mean - target).abs() <= 4.0 * est.std_error,
        "mean {} vs {target} (se {})",
        est.mean,
        est.std_error
    );
}
