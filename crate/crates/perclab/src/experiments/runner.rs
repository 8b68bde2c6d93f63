//! Replica execution: a registry of named scalar experiments, each run
//! once per replica on the stream derived from `(seed, replica index)`.

use rayon::prelude::*;

use crate::isolation::{germ_delta, GermParams, GermRoute};
use crate::limits::{
    sample_ld_continuous, sample_ld_discrete, sample_xn, walk_centered_statistic, ContinuousMethod,
};
use crate::percolation::percolate_counts;
use crate::regular::{simulate_levels, theorem2_statistic, LevySampler, RegularParams};
use crate::rng::Stream;
use crate::tree::urn_black_count;
use crate::yule::{pipeline_giant, tau_statistic, yule_simulate};
use crate::{Error, Result};

use super::config::{ExperimentConfig, Params};

type ReplicaFn = Box<dyn Fn(&mut Stream) -> Result<f64> + Sync + Send>;

/// Names accepted by [`run_replicas`]. Each produces one scalar per
/// replica.
pub const EXPERIMENT_NAMES: [&str; 14] = [
    "giant-direct",
    "giant-pipeline",
    "delta-direct",
    "germ-direct",
    "germ-clock",
    "urn-black",
    "walk-center",
    "ld-discrete",
    "ld-continuous-stable",
    "ld-continuous-scaled",
    "xn",
    "levy",
    "theorem2-stat",
    "tau-stat",
];

pub fn experiment_names() -> &'static [&'static str] {
    &EXPERIMENT_NAMES
}

fn p_from_c(n: u64, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Config("supercritical parameter needs n >= 3".into()));
    }
    let p = 1.0 - c / (n as f64).ln();
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("1 - c/ln n = {p} outside [0, 1]")));
    }
    Ok(p)
}

fn build(config: &ExperimentConfig) -> Result<ReplicaFn> {
    let params: Params = config.params;
    match config.experiment.as_str() {
        "giant-direct" => {
            let n = params.require_n()?;
            let p = p_from_c(n, params.require_c()?)?;
            Ok(Box::new(move |rng| {
                Ok(percolate_counts(n, p, rng, None)?.root_cluster_size as f64)
            }))
        }
        "giant-pipeline" => {
            let n = params.require_n()?;
            let c = params.require_c()?;
            Ok(Box::new(move |rng| Ok(pipeline_giant(n, c, rng)?.clones as f64)))
        }
        "delta-direct" => {
            let n = params.require_n()?;
            let p = p_from_c(n, params.require_c()?)?;
            Ok(Box::new(move |rng| {
                Ok(percolate_counts(n, p, rng, None)?.disconnected as f64)
            }))
        }
        "germ-direct" | "germ-clock" => {
            let route = if config.experiment == "germ-direct" {
                GermRoute::DirectPercolation
            } else {
                GermRoute::ClockCutoff
            };
            let c = params.require_c()?;
            // Standalone germ regime from k, or the pipeline regime from n.
            let germ = match (params.k, params.n) {
                (Some(k), None) => GermParams::standalone(k, c)?,
                (None, Some(n)) => GermParams::pipeline(n, c)?,
                _ => {
                    return Err(Error::Config(
                        "germ experiments need exactly one of `k` (standalone) or `n` (pipeline)"
                            .into(),
                    ))
                }
            };
            Ok(Box::new(move |rng| Ok(germ_delta(&germ, rng, route)? as f64)))
        }
        "urn-black" => {
            let n = params.require_n()?;
            let p = params.require_p()?;
            Ok(Box::new(move |rng| Ok(urn_black_count(n, p, rng)? as f64)))
        }
        "walk-center" => {
            let steps = params.require_steps()?;
            Ok(Box::new(move |rng| walk_centered_statistic(steps, rng)))
        }
        "ld-discrete" => {
            let m = params.require_m()?;
            Ok(Box::new(move |rng| Ok(sample_ld_discrete(m, rng)? as f64)))
        }
        "ld-continuous-stable" => Ok(Box::new(move |rng| {
            sample_ld_continuous(ContinuousMethod::StableTransform, rng)
        })),
        "ld-continuous-scaled" => {
            let m = params.require_m()?;
            Ok(Box::new(move |rng| {
                sample_ld_continuous(ContinuousMethod::ScaledDiscrete { m }, rng)
            }))
        }
        "xn" => {
            let n = params.require_n()?;
            let c = params.require_c()?;
            Ok(Box::new(move |rng| Ok(sample_xn(n, c, rng)? as f64)))
        }
        "levy" => {
            let d = params.d_or_default();
            let b = params.b.unwrap_or(0.0);
            let t = params.t_or_default();
            let sampler = LevySampler::new(d, b)?;
            Ok(Box::new(move |rng| sampler.sample(t, rng)))
        }
        "theorem2-stat" => {
            let d = params.d_or_default();
            let h = params.require_h()?;
            let c = params.require_c()?;
            let rp = RegularParams::new(d, h, c)?;
            Ok(Box::new(move |rng| {
                let path = simulate_levels(&rp, h, rng)?;
                theorem2_statistic(path.disconnected_fraction(h as usize), &rp)
            }))
        }
        "tau-stat" => {
            let n = params.require_n()?;
            let c = params.require_c()?;
            let p = p_from_c(n, c)?;
            let k0 = crate::isolation::growth_threshold(n, 4.0)?;
            Ok(Box::new(move |rng| {
                let run = yule_simulate(k0, 0, n, p, rng, false)?;
                tau_statistic(&run, n)
            }))
        }
        other => Err(Error::Config(format!(
            "unknown experiment `{other}`; known: {}",
            EXPERIMENT_NAMES.join(", ")
        ))),
    }
}

/// Run one closure per replica on deterministic `(seed, index)` streams,
/// optionally bounded to `workers` threads. The returned vector is in
/// replica order regardless of scheduling.
pub fn parallel_replicas<T, F>(
    seed: u64,
    replicas: u64,
    workers: Option<usize>,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> Result<T> + Sync,
{
    let body = || {
        (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = Stream::substream(seed, r);
                f(r, &mut rng)
            })
            .collect::<Result<Vec<T>>>()
    };
    match workers {
        None => body(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            pool.install(body)
        }
    }
}

/// Execute the named experiment once per replica; replica `r` draws from
/// the stream derived from `(seed, r)`.
pub fn run_replicas(config: &ExperimentConfig) -> Result<Vec<f64>> {
    let replicas = config.params.replicas_or(1);
    if replicas == 0 {
        return Err(Error::Config("replicas must be >= 1".into()));
    }
    let f = build(config)?;
    parallel_replicas(config.seed, replicas, config.workers, |_, rng| f(rng))
}
