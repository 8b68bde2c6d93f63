//! Yule-embedding laws: hitting-time concentration, the embedded jump
//! chain against direct percolation, the composition estimate behind the
//! main theorem, and the mutant-descent statistic.

use perclab::experiments::parallel_replicas;
use perclab::isolation::{germ_delta, growth_threshold, GermParams, GermRoute};
use perclab::percolation::{decompose, percolate_counts};
use perclab::stats::{ks_two_sample, mean_with_error, quantile};
use perclab::tree::MarkOrder;
use perclab::yule::{mutant_descent_from_tree, tau_statistic, yule_simulate};

fn tau_stats(n: u64, reps: u64, salt: u64) -> Vec<f64> {
    let k0 = growth_threshold(n, 4.0).unwrap();
    let p = 1.0 - 1.0 / (n as f64).ln();
    parallel_replicas(2100 + salt, reps, None, |_, rng| {
        let run = yule_simulate(k0, 0, n, p, rng, false)?;
        tau_statistic(&run, n)
    })
    .unwrap()
}

/// e^{tau} ln^4 n / n concentrates near one; its spread shrinks with n.
#[test]
fn tau_concentration_and_dispersion() {
    let stats6 = tau_stats(1_000_000, 300, 0);
    let m6 = mean_with_error(&stats6);
    assert!(
        (m6.mean - 1.0).abs() < 0.05,
        "mean tau statistic {} not within 5% of 1",
        m6.mean
    );
    for &s in &stats6 {
        assert!(s > 0.0);
    }
    let spread = |xs: &[f64]| quantile(xs, 0.9) - quantile(xs, 0.1);
    let stats4 = tau_stats(10_000, 300, 1);
    let stats5 = tau_stats(100_000, 300, 2);
    let (s4, s5, s6) = (spread(&stats4), spread(&stats5), spread(&stats6));
    assert!(s5 < s4, "dispersion did not shrink: {s4} -> {s5}");
    assert!(s6 < s5, "dispersion did not shrink: {s5} -> {s6}");
}

/// The embedded jump chain of a marked Yule run has exactly the law of
/// during-growth marking: two-sample tests on (G_n, Δ_n).
#[test]
fn embedded_chain_matches_during_growth_law() {
    let n = 1000u64;
    let p = 0.85;
    let reps = 8000u64;
    let from_yule = parallel_replicas(2110, reps, None, |_, rng| {
        let run = yule_simulate(1, 0, n, p, rng, true)?;
        let d = decompose(run.embedded.as_ref().unwrap(), None)?;
        Ok((d.root_cluster_size as f64, d.disconnected as f64))
    })
    .unwrap();
    let direct = parallel_replicas(2111, reps, None, |_, rng| {
        let m = perclab::tree::MarkedTree::sample(n, p, rng, MarkOrder::DuringGrowth)?;
        let d = decompose(&m, None)?;
        Ok((d.root_cluster_size as f64, d.disconnected as f64))
    })
    .unwrap();
    let g_y: Vec<f64> = from_yule.iter().map(|x| x.0).collect();
    let g_d: Vec<f64> = direct.iter().map(|x| x.0).collect();
    let ks = ks_two_sample(&g_y, &g_d).unwrap();
    assert!(ks.p_value > 1e-3, "G rejected: {ks:?}");
    let d_y: Vec<f64> = from_yule.iter().map(|x| x.1).collect();
    let d_d: Vec<f64> = direct.iter().map(|x| x.1).collect();
    let ks = ks_two_sample(&d_y, &d_d).unwrap();
    assert!(ks.p_value > 1e-3, "Δ rejected: {ks:?}");
}

/// Composition estimate: G_n / (e^{p tau} (k0 - Δ_k)) concentrates near
/// one, more tightly as n grows.
#[test]
fn composition_ratio_concentrates() {
    let c = 1.0f64;
    let ratio_spread = |n: u64, reps: u64, salt: u64| -> (f64, f64) {
        let params = GermParams::pipeline(n, c).unwrap();
        let ratios = parallel_replicas(2120 + salt, reps, None, |_, rng| {
            let delta_k = germ_delta(&params, rng, GermRoute::DirectPercolation)?;
            let run = yule_simulate(params.k, delta_k, n, params.survival, rng, false)?;
            let predicted = (params.survival * run.tau).exp() * (params.k - delta_k) as f64;
            Ok(run.clones as f64 / predicted)
        })
        .unwrap();
        let m = mean_with_error(&ratios);
        (m.mean, quantile(&ratios, 0.9) - quantile(&ratios, 0.1))
    };
    let (mean5, spread5) = ratio_spread(100_000, 400, 0);
    let (mean6, spread6) = ratio_spread(1_000_000, 400, 1);
    assert!((mean6 - 1.0).abs() < 0.02, "ratio mean {mean6} far from 1");
    assert!((mean5 - 1.0).abs() < 0.05, "ratio mean {mean5} far from 1");
    assert!(spread6 < spread5, "no tightening: {spread5} -> {spread6}");
}

/// Mutant-descent statistic: computed from prefix labels on the tree and
/// headed toward c(Z + ln c). Checked at the distribution level against
/// the germ+growth route.
#[test]
fn mutant_descent_two_routes_same_law() {
    let n = 20_000u64;
    let c = 1.0f64;
    let params = GermParams::pipeline(n, c).unwrap();
    let k = params.k;
    let reps = 4000u64;
    // route 1: labels on a fully percolated tree
    let by_labels = parallel_replicas(2130, reps, None, |_, rng| {
        let m = perclab::tree::MarkedTree::sample(n, params.survival, rng, MarkOrder::DuringGrowth)?;
        Ok(mutant_descent_from_tree(&m, k)? as f64)
    })
    .unwrap();
    // route 2: germ count spread by the descent-tracking Yule run
    let by_descent = parallel_replicas(2131, reps, None, |_, rng| {
        let delta_k = germ_delta(&params, rng, GermRoute::DirectPercolation)?;
        let run = yule_simulate(k, delta_k, n, params.survival, rng, false)?;
        Ok(run.initial_descent as f64)
    })
    .unwrap();
    let ks = ks_two_sample(&by_labels, &by_descent).unwrap();
    assert!(ks.p_value > 1e-3, "descent routes rejected: {ks:?}");
}

/// Streaming prefix counting agrees with the descent statistic trend: the
/// statistic's distribution moves toward c(Z + ln c) as n grows.
#[test]
fn mutant_descent_statistic_trend() {
    let c = 1.0f64;
    let refs = parallel_replicas(2140, 100_000, None, |_, rng| {
        let z = perclab::limits::sample_ld_continuous(
            perclab::limits::ContinuousMethod::StableTransform,
            rng,
        )?;
        Ok(c * (z + c.ln()))
    })
    .unwrap();
    let distance = |n: u64, reps: u64, salt: u64| -> f64 {
        let k = growth_threshold(n, 4.0).unwrap();
        let p = 1.0 - c / (n as f64).ln();
        let stats = parallel_replicas(2141 + salt, reps, None, |_, rng| {
            let d = percolate_counts(n, p, rng, Some(k))?;
            perclab::yule::mutant_descent_statistic(d.prefix_mutants.unwrap(), n, c)
        })
        .unwrap();
        ks_two_sample(&stats, &refs).unwrap().statistic
    };
    let d4 = distance(10_000, 1500, 0);
    let d5 = distance(100_000, 2500, 1);
    let d6 = distance(1_000_000, 4000, 2);
    eprintln!("mutant-descent KS ladder: {d4:.4} {d5:.4} {d6:.4}");
    assert!(d5 < d4, "no decrease: {d4} -> {d5}");
    assert!(d6 < d5, "no decrease: {d5} -> {d6}");
}
