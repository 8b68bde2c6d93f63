//! Continuous-time Yule embedding of recursive-tree growth with rare
//! neutral mutations: hitting times, clone/mutant counts, the pathwise
//! identity between the clone count and the root cluster, and the descent
//! of the initial mutant population.

use crate::isolation::{germ_delta, growth_threshold, GermParams, GermRoute};
use crate::percolation::LimitStatistic;
use crate::rng::Stream;
use crate::tree::{MarkedTree, RecursiveTree};
use crate::{Error, Result};

/// Outcome of one Yule run observed when the population reaches `n`.
#[derive(Debug, Clone)]
pub struct YuleRun {
    pub k0: u64,
    pub m0: u64,
    pub n: u64,
    /// Clone-birth probability: each birth is marked (a mutation) with
    /// probability `1 - survival_prob`.
    pub survival_prob: f64,
    /// Elapsed time when the population hits `n`.
    pub tau: f64,
    /// Individuals with no mark anywhere on their ancestral lineage.
    pub clones: u64,
    /// Individuals with at least one mark on their lineage (`n - clones`).
    pub mutants: u64,
    /// Descendants (including themselves) of the `m0` initial mutants;
    /// marks after the start do not add to this count.
    pub initial_descent: u64,
    /// The jump chain as a marked tree, when requested and `k0 = 1`.
    pub embedded: Option<MarkedTree>,
}

/// Simulate a Yule process from `k0` individuals (`m0` of them mutants) to
/// total population `n`. Each individual gives birth at unit rate, so the
/// wait at size `l` is exponential with parameter `l`; the parent is
/// uniform among the living and the new edge is marked with probability
/// `1 - p`. A child of a mutant is a mutant regardless of its own mark.
pub fn yule_simulate(
    k0: u64,
    m0: u64,
    n: u64,
    p: f64,
    rng: &mut Stream,
    keep_embedded: bool,
) -> Result<YuleRun> {
    if k0 == 0 || k0 > n {
        return Err(Error::invalid("k0", format!("need 1 <= k0 <= n, got k0={k0} n={n}")));
    }
    if m0 > k0 {
        return Err(Error::invalid("m0", "initial mutants cannot exceed k0"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("probability {p} outside [0, 1]")));
    }
    if keep_embedded && (k0 != 1 || m0 != 0) {
        return Err(Error::invalid(
            "keep_embedded",
            "the jump chain is a marked tree only when started from a single clone",
        ));
    }
    let mark_prob = 1.0 - p;

    // tau is a sum of ~n tiny increments; compensate the summation.
    let mut tau = 0.0f64;
    let mut comp = 0.0f64;
    let mut add_time = |acc: &mut f64, x: f64| {
        let y = x - comp;
        let t = *acc + y;
        comp = (t - *acc) - y;
        *acc = t;
    };

    if keep_embedded {
        let mut parents: Vec<u32> = Vec::with_capacity((n - 1) as usize);
        let mut removed: Vec<bool> = Vec::with_capacity((n - 1) as usize);
        // mutant[v] = some edge on the branch of v is marked
        let mut mutant = vec![false; (n + 1) as usize];
        let mut clones = 1u64;
        for size in 1..n {
            add_time(&mut tau, rng.exponential() / size as f64);
            let parent = 1 + rng.below(size);
            let marked = rng.bernoulli(mark_prob);
            parents.push(parent as u32);
            removed.push(marked);
            let child = size + 1;
            let is_mutant = marked || mutant[parent as usize];
            mutant[child as usize] = is_mutant;
            if !is_mutant {
                clones += 1;
            }
        }
        let tree = RecursiveTree::from_parents(parents)?;
        let embedded = MarkedTree::from_parts(tree, &removed, p)?;
        Ok(YuleRun {
            k0,
            m0,
            n,
            survival_prob: p,
            tau,
            clones,
            mutants: n - clones,
            initial_descent: 0,
            embedded: Some(embedded),
        })
    } else {
        // Counts suffice: individuals are exchangeable, so the category of
        // a uniform parent is multinomial on (clones, descent, later
        // mutants). Only clone births need a mark draw.
        let mut clones = k0 - m0;
        let mut descent = m0;
        for size in k0..n {
            add_time(&mut tau, rng.exponential() / size as f64);
            let pick = rng.below(size);
            if pick < clones {
                if rng.bernoulli(mark_prob) {
                    // new mutant line outside the initial descent
                } else {
                    clones += 1;
                }
            } else if pick < clones + descent {
                descent += 1;
            }
            // later-mutant parents breed later mutants; counts follow from
            // the size
        }
        Ok(YuleRun {
            k0,
            m0,
            n,
            survival_prob: p,
            tau,
            clones,
            mutants: n - clones,
            initial_descent: descent,
            embedded: None,
        })
    }
}

/// Concentration statistic of Lemma-3 type: `e^tau ln^4 n / n`, for runs
/// started at the growth threshold `k0 = floor(ln^4 n)`.
pub fn tau_statistic(run: &YuleRun, n: u64) -> Result<f64> {
    if run.n != n {
        return Err(Error::invalid("n", "run was observed at a different population"));
    }
    let expected_k0 = growth_threshold(n, 4.0)?;
    if run.k0 != expected_k0 {
        return Err(Error::invalid(
            "k0",
            format!("run started from {} but the threshold for n={n} is {expected_k0}", run.k0),
        ));
    }
    Ok(run.tau.exp() * (n as f64).ln().powi(4) / n as f64)
}

/// `(ln n / n) Δ_{k,n} - 3 c ln ln n` for a prefix-mutant count `Δ_{k,n}`.
pub fn mutant_descent_statistic(delta_kn: u64, n: u64, c: f64) -> Result<f64> {
    LimitStatistic::MutantDescent { n, c }.apply(delta_kn as f64)
}

/// `Δ_{k,n}` read off a percolated tree: vertices whose branch contains a
/// removed edge with child label at most `k`.
pub fn mutant_descent_from_tree(marked: &MarkedTree, k: u64) -> Result<u64> {
    let d = crate::percolation::decompose(marked, Some(k))?;
    Ok(d.prefix_mutants.expect("prefix bound supplied"))
}

/// The two-phase realization of percolation on `T_n`: percolate the
/// partially grown tree at the threshold `k = floor(ln^4 n)` (the germ),
/// then spread by a Yule process with mutation probability `c / ln n`.
/// The law of `(clones, mutants)` is exactly that of Bernoulli bond
/// percolation on a uniform recursive tree of size `n`.
pub fn pipeline_giant(n: u64, c: f64, rng: &mut Stream) -> Result<YuleRun> {
    let params = GermParams::pipeline(n, c)?;
    let delta_k = germ_delta(&params, rng, GermRoute::DirectPercolation)?;
    yule_simulate(params.k, delta_k, n, params.survival, rng, false)
}
