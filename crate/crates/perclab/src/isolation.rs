//! The Meir–Moon root-isolation algorithm in explicit-tree and
//! distributional form, the pathwise coupling with the step-law random
//! walk, continuous-time percolation clocks, and the germ statistic.

use crate::limits::sample_xi;
use crate::rng::Stream;
use crate::tree::RecursiveTree;
use crate::{Error, Result};

/// Record of one root-isolation run: cut-subtree sizes, their partial sums
/// `D_k(l)`, and optionally the continuous-time cut instants `rho_k(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolationTrace {
    /// Initial tree size.
    pub k: u64,
    /// Sizes of the detached subtrees, in cut order.
    pub cuts: Vec<u64>,
    /// `partials[l-1] = cuts[0] + .. + cuts[l-1]`.
    pub partials: Vec<u64>,
    /// Cut instants of the continuous-time percolation, strictly
    /// increasing, when a schedule has been attached.
    pub times: Option<Vec<f64>>,
}

impl IsolationTrace {
    /// Vertices disconnected after `l` cuts (`D_k(l)`; `D_k(0) = 0`).
    pub fn disconnected_after(&self, l: usize) -> u64 {
        if l == 0 {
            0
        } else {
            self.partials[l - 1]
        }
    }

    /// A complete run detaches everything but the root.
    pub fn is_complete(&self) -> bool {
        self.partials.last().copied().unwrap_or(0) == self.k - 1
    }
}

/// Isolate the root of an explicit tree: repeatedly remove a uniform edge
/// of the current root subtree, set the detached part aside, and record its
/// size. Each edge is touched O(1) times overall.
pub fn meir_moon_explicit(tree: &RecursiveTree, rng: &mut Stream) -> IsolationTrace {
    let k = tree.vertex_count();
    if k == 1 {
        return IsolationTrace {
            k,
            cuts: vec![],
            partials: vec![],
            times: None,
        };
    }
    let children = tree.children();
    // Pool of live edges (edge = child vertex label) with positions for
    // O(1) swap-removal.
    let mut pool: Vec<u32> = (2..=k as u32).collect();
    let mut pos: Vec<u32> = vec![0; (k + 1) as usize];
    for (i, &e) in pool.iter().enumerate() {
        pos[e as usize] = i as u32;
    }
    let mut detached = vec![false; (k + 1) as usize];
    let mut cuts = Vec::new();
    let mut partials = Vec::new();
    let mut disconnected = 0u64;
    let mut stack: Vec<u32> = Vec::new();

    fn retire(pool: &mut Vec<u32>, pos: &mut [u32], e: u32) {
        let at = pos[e as usize] as usize;
        pool.swap_remove(at);
        if at < pool.len() {
            pos[pool[at] as usize] = at as u32;
        }
    }

    while !pool.is_empty() {
        let cut_edge = pool[rng.below(pool.len() as u64) as usize];
        // Enumerate the detached subtree rooted at the cut edge's child,
        // retiring every edge inside it from the pool.
        let mut size = 0u64;
        stack.push(cut_edge);
        while let Some(v) = stack.pop() {
            detached[v as usize] = true;
            retire(&mut pool, &mut pos, v);
            size += 1;
            for &c in children.children(v as u64) {
                if !detached[c as usize] {
                    stack.push(c);
                }
            }
        }
        disconnected += size;
        cuts.push(size);
        partials.push(disconnected);
    }
    debug_assert_eq!(disconnected, k - 1);
    IsolationTrace {
        k,
        cuts,
        partials,
        times: None,
    }
}

/// One cut-size draw from the conditional law
/// `P(δ = j | remaining size m) = (m/(m-1)) / (j (j+1))`, `j = 1..m-1`,
/// by exact inversion of the CDF `(m/(m-1)) j/(j+1)`.
pub fn conditional_cut_size(m: u64, rng: &mut Stream) -> u64 {
    debug_assert!(m >= 2);
    if m == 2 {
        return 1;
    }
    let w = rng.uniform() * (m - 1) as f64 / m as f64;
    let j = (1.0 / (1.0 - w)).floor() as u64;
    j.clamp(1, m - 1)
}

/// Distributional root isolation: sample the cut-size sequence directly
/// from the conditional law, without building a tree. Same law as
/// [`meir_moon_explicit`] on a fresh uniform recursive tree of size `k`.
pub fn meir_moon_distributional(k: u64, rng: &mut Stream) -> IsolationTrace {
    let mut cuts = Vec::new();
    let mut partials = Vec::new();
    let mut remaining = k;
    let mut disconnected = 0u64;
    while remaining >= 2 {
        let j = conditional_cut_size(remaining, rng);
        remaining -= j;
        disconnected += j;
        cuts.push(j);
        partials.push(disconnected);
    }
    IsolationTrace {
        k,
        cuts,
        partials,
        times: None,
    }
}

/// A root isolation pathwise coupled with the step-law random walk.
#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub trace: IsolationTrace,
    /// `walk[l] = S_l`, recorded for `l = 0..=first_passage`.
    pub walk: Vec<u64>,
    /// `N(k) = min{l : S_l >= k}`.
    pub first_passage: u64,
}

/// Run the isolation of a size-`k` tree by drawing raw walk steps
/// `P(ξ = j) = 1/(j(j+1))` and rejecting steps larger than the remaining
/// non-root part. Until the first rejected step the cut sizes are the raw
/// steps, which forces the identity `D_k(l) = S_l` for all `l < N(k)`.
pub fn coupled_walk_isolation(k: u64, rng: &mut Stream) -> Result<CoupledRun> {
    if k < 2 {
        return Err(Error::invalid("k", "coupled isolation needs k >= 2"));
    }
    let mut cuts = Vec::new();
    let mut partials = Vec::new();
    let mut walk = vec![0u64];
    let mut first_passage = None;
    let mut remaining = k;
    let mut disconnected = 0u64;
    while remaining >= 2 {
        let bound = remaining - 1; // at most the non-root part
        let mut step = sample_xi(rng);
        if first_passage.is_none() {
            walk.push(walk.last().unwrap().saturating_add(step));
            if step > bound {
                // The walk has crossed k: S_l = D_k(l-1) + ξ_l >= k.
                first_passage = Some(walk.len() as u64 - 1);
            }
        }
        while step > bound {
            step = sample_xi(rng);
        }
        remaining -= step;
        disconnected += step;
        cuts.push(step);
        partials.push(disconnected);
    }
    // If the root was isolated before any step was rejected, the walk's
    // next raw step would land at or above k with the next draw; complete
    // the walk until it crosses.
    let first_passage = match first_passage {
        Some(l) => l,
        None => loop {
            let step = sample_xi(rng);
            walk.push(walk.last().unwrap().saturating_add(step));
            if *walk.last().unwrap() >= k {
                break walk.len() as u64 - 1;
            }
        },
    };
    Ok(CoupledRun {
        trace: IsolationTrace {
            k,
            cuts,
            partials,
            times: None,
        },
        walk,
        first_passage,
    })
}

/// Attach continuous-time cut instants to a trace: each edge of `T_k`
/// carries an independent exponential clock of rate `k^{-1/4}`, so the
/// l-th root-cluster cut happens after a further exponential with mean
/// `k^{1/4} / (k - D_k(l-1) - 1)`.
pub fn percolation_schedule(trace: &IsolationTrace, rng: &mut Stream) -> IsolationTrace {
    let k = trace.k;
    let rate_scale = (k as f64).powf(0.25);
    let mut times = Vec::with_capacity(trace.cuts.len());
    let mut t = 0.0;
    for l in 0..trace.cuts.len() {
        let edges_left = k - trace.disconnected_after(l) - 1;
        if edges_left == 0 {
            break;
        }
        t += rate_scale / edges_left as f64 * rng.exponential();
        times.push(t);
    }
    IsolationTrace {
        k,
        cuts: trace.cuts.clone(),
        partials: trace.partials.clone(),
        times: Some(times),
    }
}

/// Parameterization of the germ stage: tree size `k`, per-edge survival
/// probability, and the continuous-time cutoff `t_k = -k^{1/4} ln q_k`.
#[derive(Debug, Clone, Copy)]
pub struct GermParams {
    pub k: u64,
    pub survival: f64,
    pub cutoff: f64,
    pub c: f64,
}

impl GermParams {
    /// Standalone regime `q_k = 1 - c k^{-1/4}`.
    pub fn standalone(k: u64, c: f64) -> Result<GermParams> {
        if k < 2 {
            return Err(Error::invalid("k", "germ stage needs k >= 2"));
        }
        if c < 0.0 || !c.is_finite() {
            return Err(Error::invalid("c", "intensity must be nonnegative"));
        }
        let q = 1.0 - c * (k as f64).powf(-0.25);
        if q <= 0.0 {
            return Err(Error::invalid(
                "c",
                format!("c k^(-1/4) = {} >= 1; k too small for this c", 1.0 - q),
            ));
        }
        Ok(GermParams {
            k,
            survival: q,
            cutoff: -(k as f64).powf(0.25) * q.ln(),
            c,
        })
    }

    /// Pipeline regime: the percolation parameter stays `p_n = 1 - c/ln n`
    /// and the tree size is the growth threshold `k = floor(ln^4 n)`.
    pub fn pipeline(n: u64, c: f64) -> Result<GermParams> {
        GermParams::pipeline_with_exponent(n, c, 4.0)
    }

    /// Pipeline regime with a configurable threshold exponent
    /// (`k = floor(ln^alpha n)`, default 4).
    pub fn pipeline_with_exponent(n: u64, c: f64, alpha: f64) -> Result<GermParams> {
        let k = growth_threshold(n, alpha)?;
        let q = 1.0 - c / (n as f64).ln();
        if q <= 0.0 || q > 1.0 {
            return Err(Error::invalid("c", "1 - c/ln n must lie in (0, 1]"));
        }
        Ok(GermParams {
            k,
            survival: q,
            cutoff: -(k as f64).powf(0.25) * q.ln(),
            c,
        })
    }
}

/// The growth threshold `k = floor(ln^alpha n)` separating the germ stage
/// from the spread stage.
pub fn growth_threshold(n: u64, alpha: f64) -> Result<u64> {
    if n < 3 {
        return Err(Error::invalid("n", "pipeline needs n >= 3"));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::invalid("alpha", "threshold exponent must be positive"));
    }
    let k = (n as f64).ln().powf(alpha).floor() as u64;
    if k < 2 {
        return Err(Error::invalid("n", "growth threshold below 2; n too small"));
    }
    if k >= n {
        return Err(Error::invalid("n", "growth threshold exceeds n"));
    }
    Ok(k)
}

/// How to realize the germ count `Δ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GermRoute {
    /// Continuous-time isolation stopped at the cutoff `t_k`.
    ClockCutoff,
    /// Bernoulli percolation of a fresh size-`k` tree, via the one-pass
    /// streaming kernel.
    DirectPercolation,
}

/// Number of vertices of `T_k` disconnected from the root under percolation
/// with the germ parameters; both routes realize the same law.
pub fn germ_delta(params: &GermParams, rng: &mut Stream, route: GermRoute) -> Result<u64> {
    match route {
        GermRoute::DirectPercolation => {
            Ok(crate::percolation::percolate_counts(params.k, params.survival, rng, None)?
                .disconnected)
        }
        GermRoute::ClockCutoff => {
            // Fused distributional isolation + schedule, stopped at t_k:
            // cuts strictly after the cutoff never get made.
            let k = params.k;
            let rate_scale = (k as f64).powf(0.25);
            let mut elapsed = 0.0;
            let mut remaining = k;
            let mut disconnected = 0u64;
            while remaining >= 2 {
                let edges_left = remaining - 1;
                elapsed += rate_scale / edges_left as f64 * rng.exponential();
                if elapsed > params.cutoff {
                    break;
                }
                let j = conditional_cut_size(remaining, rng);
                remaining -= j;
                disconnected += j;
            }
            Ok(disconnected)
        }
    }
}
