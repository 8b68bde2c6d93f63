//! Cluster decomposition of a marked tree in one forward pass, and the
//! affine rescalings that turn raw counts into limit statistics.

use crate::rng::Stream;
use crate::tree::MarkedTree;
use crate::{Error, Result};

/// Percolation clusters of a marked tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub n: u64,
    /// Size of the cluster containing the root (`G_n`).
    pub root_cluster_size: u64,
    /// Vertices disconnected from the root (`Δ_n = n - G_n`).
    pub disconnected: u64,
    /// Sizes of the off-root clusters, nonincreasing. One cluster per
    /// removed edge (its child endpoint is the cluster root).
    pub ranked_sizes: Vec<u64>,
    /// Number of vertices whose branch to the root contains a removed edge
    /// with child label `<= prefix_k`, when a prefix bound was supplied.
    pub prefix_mutants: Option<u64>,
}

/// Decompose a marked tree into percolation clusters.
///
/// Single forward pass over vertex labels: each vertex's nearest cut
/// ancestor is itself if its edge is removed, otherwise its parent's
/// (valid because `parent[i] < i`).
pub fn decompose(marked: &MarkedTree, prefix_k: Option<u64>) -> Result<ClusterDecomposition> {
    let n = marked.vertex_count();
    if let Some(k) = prefix_k {
        if k == 0 || k > n {
            return Err(Error::invalid(
                "prefix_k",
                format!("prefix bound {k} outside 1..={n}"),
            ));
        }
    }
    let mut nearest_cut = vec![0u32; (n + 1) as usize]; // 0 = no cut ancestor
    let mut cluster_count = vec![0u32; (n + 1) as usize]; // indexed by cut root
    let mut in_prefix = prefix_k.map(|_| vec![false; (n + 1) as usize]);
    let mut root_cluster_size = 1u64; // the root itself
    let mut prefix_mutants = 0u64;

    for i in 2..=n {
        let parent = marked.tree().parent(i).expect("non-root vertex") as u64;
        let cut = if marked.removed(i) {
            i as u32
        } else {
            nearest_cut[parent as usize]
        };
        nearest_cut[i as usize] = cut;
        if cut == 0 {
            root_cluster_size += 1;
        } else {
            cluster_count[cut as usize] += 1;
        }
        if let (Some(flags), Some(k)) = (in_prefix.as_mut(), prefix_k) {
            let flagged = (marked.removed(i) && i <= k) || flags[parent as usize];
            flags[i as usize] = flagged;
            if flagged {
                prefix_mutants += 1;
            }
        }
    }

    let mut ranked_sizes: Vec<u64> = (2..=n)
        .filter(|&i| marked.removed(i))
        .map(|i| cluster_count[i as usize] as u64)
        .collect();
    ranked_sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ClusterDecomposition {
        n,
        root_cluster_size,
        disconnected: n - root_cluster_size,
        ranked_sizes,
        prefix_mutants: prefix_k.map(|_| prefix_mutants),
    })
}

/// Cluster counts of a streamed percolation, without the ranked sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PercolationCounts {
    pub n: u64,
    pub root_cluster_size: u64,
    pub disconnected: u64,
    pub prefix_mutants: Option<u64>,
}

/// Counts-only version of [`percolate_streaming`]: same draws from the
/// stream, but skips the per-cluster bookkeeping. The workhorse for
/// replica sweeps that only need `G_n`, `Δ_n`, or `Δ_{k,n}`.
pub fn percolate_counts(
    n: u64,
    p: f64,
    rng: &mut Stream,
    prefix_k: Option<u64>,
) -> Result<PercolationCounts> {
    check_streaming_params(n, p, prefix_k)?;
    let remove_prob = 1.0 - p;
    let mut nearest_cut = vec![0u32; (n + 1) as usize];
    let mut root_cluster_size = 1u64;
    let counts = match prefix_k {
        None => {
            for i in 2..=n {
                let parent = 1 + rng.below(i - 1);
                let cut = if rng.bernoulli(remove_prob) {
                    i as u32
                } else {
                    nearest_cut[parent as usize]
                };
                nearest_cut[i as usize] = cut;
                root_cluster_size += u64::from(cut == 0);
            }
            PercolationCounts {
                n,
                root_cluster_size,
                disconnected: n - root_cluster_size,
                prefix_mutants: None,
            }
        }
        Some(k) => {
            // the nearest-cut word carries the prefix flag in its top bit
            const FLAG: u32 = 1 << 31;
            let mut prefix_mutants = 0u64;
            for i in 2..=n {
                let parent = 1 + rng.below(i - 1);
                let removed = rng.bernoulli(remove_prob);
                let parent_word = nearest_cut[parent as usize];
                let cut = if removed { i as u32 } else { parent_word & !FLAG };
                let flagged = (removed && i <= k) || parent_word & FLAG != 0;
                nearest_cut[i as usize] = cut | if flagged { FLAG } else { 0 };
                root_cluster_size += u64::from(cut == 0);
                prefix_mutants += u64::from(flagged);
            }
            PercolationCounts {
                n,
                root_cluster_size,
                disconnected: n - root_cluster_size,
                prefix_mutants: Some(prefix_mutants),
            }
        }
    };
    Ok(counts)
}

fn check_streaming_params(n: u64, p: f64, prefix_k: Option<u64>) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "vertex count must be positive"));
    }
    if n >= (1 << 31) {
        return Err(Error::invalid("n", "streaming kernels support n < 2^31"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("probability {p} outside [0, 1]")));
    }
    if let Some(k) = prefix_k {
        if k == 0 || k > n {
            return Err(Error::invalid(
                "prefix_k",
                format!("prefix bound {k} outside 1..={n}"),
            ));
        }
    }
    Ok(())
}

/// Grow, mark, and decompose in one fused streaming pass, without storing
/// the tree. Pathwise identical to
/// `decompose(&MarkedTree::sample(n, p, rng, MarkOrder::DuringGrowth), prefix_k)`
/// for the same stream; memory is one `u32` per vertex.
pub fn percolate_streaming(
    n: u64,
    p: f64,
    rng: &mut Stream,
    prefix_k: Option<u64>,
) -> Result<ClusterDecomposition> {
    check_streaming_params(n, p, prefix_k)?;
    let remove_prob = 1.0 - p;
    // nearest_cut doubles as the removal record: nearest_cut[i] == i marks
    // a removed edge.
    let mut nearest_cut = vec![0u32; (n + 1) as usize];
    let mut cluster_count = vec![0u32; (n + 1) as usize];
    let mut in_prefix = prefix_k.map(|_| vec![false; (n + 1) as usize]);
    let mut root_cluster_size = 1u64;
    let mut prefix_mutants = 0u64;

    for i in 2..=n {
        let parent = 1 + rng.below(i - 1);
        let removed = rng.bernoulli(remove_prob);
        let cut = if removed {
            i as u32
        } else {
            nearest_cut[parent as usize]
        };
        nearest_cut[i as usize] = cut;
        if cut == 0 {
            root_cluster_size += 1;
        } else {
            cluster_count[cut as usize] += 1;
        }
        if let (Some(flags), Some(k)) = (in_prefix.as_mut(), prefix_k) {
            let flagged = (removed && i <= k) || flags[parent as usize];
            flags[i as usize] = flagged;
            if flagged {
                prefix_mutants += 1;
            }
        }
    }

    let mut ranked_sizes: Vec<u64> = (2..=n)
        .filter(|&i| nearest_cut[i as usize] == i as u32)
        .map(|i| cluster_count[i as usize] as u64)
        .collect();
    ranked_sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ClusterDecomposition {
        n,
        root_cluster_size,
        disconnected: n - root_cluster_size,
        ranked_sizes,
        prefix_mutants: prefix_k.map(|_| prefix_mutants),
    })
}

/// Affine rescalings mapping raw counts to the laws they converge to.
///
/// Each variant carries the parameters its display needs; `apply` is pure
/// arithmetic. Iterated logarithms require `n, k, h >= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitStatistic {
    /// `(G_n/n - e^{-c}) ln n - c e^{-c} ln ln n`; raw value is `G_n`.
    /// Converges to `-c e^{-c} (Z + ln c)`.
    Theorem1Giant { n: u64, c: f64 },
    /// `(Δ_n/n - (1 - e^{-c})) ln n + c e^{-c} ln ln n`; raw value is `Δ_n`.
    /// Converges to `c e^{-c} (Z + ln c)`.
    DeltaForm { n: u64, c: f64 },
    /// `k^{-3/4} Δ_k - (3/4) c ln k`; raw value is `Δ_k`.
    /// Converges to `c (Z + ln c)`.
    Proposition1Germ { k: u64, c: f64 },
    /// `(ln n / n) Δ_{k,n} - 3 c ln ln n`; raw value is `Δ_{k,n}`.
    /// Converges to `c (Z + ln c)`.
    MutantDescent { n: u64, c: f64 },
    /// `(ln n / n) C`; raw value is a cluster size.
    ClusterRescale { n: u64 },
    /// `Z_m / m - ln m`; raw value is `Z_m`. Converges to `Z`.
    DiscreteLdCenter { m: f64 },
    /// `S_l / l - ln l`; raw value is `S_l`. Converges to `Z`.
    WalkCenter { steps: u64 },
    /// `h (∇_h / d^h - (1 - e^{-c})) + c e^{-c} log_d h`; the raw value is
    /// the fraction `∇_h / d^h` (counts overflow fixed-width integers at
    /// the heights of interest). Converges to `e^{-c} (L_b(c) + c b)`.
    Theorem2Regular { h: u64, d: u32, c: f64 },
}

impl LimitStatistic {
    pub fn apply(&self, raw: f64) -> Result<f64> {
        match *self {
            LimitStatistic::Theorem1Giant { n, c } => {
                let (ln_n, lnln_n) = iterated_logs(n)?;
                check_c(c)?;
                Ok((raw / n as f64 - (-c).exp()) * ln_n - c * (-c).exp() * lnln_n)
            }
            LimitStatistic::DeltaForm { n, c } => {
                let (ln_n, lnln_n) = iterated_logs(n)?;
                check_c(c)?;
                Ok((raw / n as f64 - (1.0 - (-c).exp())) * ln_n + c * (-c).exp() * lnln_n)
            }
            LimitStatistic::Proposition1Germ { k, c } => {
                let (ln_k, _) = iterated_logs(k)?;
                check_c(c)?;
                Ok(raw / (k as f64).powf(0.75) - 0.75 * c * ln_k)
            }
            LimitStatistic::MutantDescent { n, c } => {
                let (ln_n, lnln_n) = iterated_logs(n)?;
                check_c(c)?;
                Ok(ln_n / n as f64 * raw - 3.0 * c * lnln_n)
            }
            LimitStatistic::ClusterRescale { n } => {
                let (ln_n, _) = iterated_logs(n)?;
                Ok(ln_n / n as f64 * raw)
            }
            LimitStatistic::DiscreteLdCenter { m } => {
                if m <= 0.0 {
                    return Err(Error::invalid("m", "parameter must be positive"));
                }
                Ok(raw / m - m.ln())
            }
            LimitStatistic::WalkCenter { steps } => {
                if steps == 0 {
                    return Err(Error::invalid("steps", "need at least one step"));
                }
                let l = steps as f64;
                Ok(raw / l - l.ln())
            }
            LimitStatistic::Theorem2Regular { h, d, c } => {
                let (_, _) = iterated_logs(h)?;
                check_c(c)?;
                if d < 2 {
                    return Err(Error::invalid("d", "outer degree must be >= 2"));
                }
                let hf = h as f64;
                let log_d_h = hf.ln() / (d as f64).ln();
                Ok(hf * (raw - (1.0 - (-c).exp())) + c * (-c).exp() * log_d_h)
            }
        }
    }
}

fn iterated_logs(n: u64) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::invalid(
            "n",
            "iterated logarithm undefined below 3",
        ));
    }
    let ln_n = (n as f64).ln();
    Ok((ln_n, ln_n.ln()))
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("c", "percolation intensity must be positive"))
    }
}
