//! Empirical-vs-theoretical transform grids, two-sample distances, and
//! named pass/fail verdicts.

use serde::{Deserialize, Serialize};

use crate::limits::{cf_continuous, gf_discrete};
use crate::regular::psi;
use crate::stats::{empirical_cf, ks_two_sample, mean_with_error, SampleSummary};
use crate::Result;

use super::config::ExperimentConfig;

/// Analytic transform a sample is compared against.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum TransformTarget {
    /// Generating function of the discrete Luria–Delbrück law; grid points
    /// are `s` values.
    GfDiscrete { m: f64 },
    /// Characteristic function of the continuous law; grid points are `θ`.
    CfContinuous,
    /// Laplace transform `exp(t Ψ_b(a))` of the Lévy process; grid points
    /// are `a` values.
    LaplaceLevy { d: u32, b: f64, t: f64 },
}

/// One grid point of a transform comparison. Real transforms leave the
/// imaginary components at zero.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransformGridPoint {
    pub point: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub theory_re: f64,
    pub theory_im: f64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    /// Both components within four standard errors.
    pub within_band: bool,
}

/// A named two-sample (or one-sample) distance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceEntry {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n_left: usize,
    pub n_right: usize,
}

/// A named check against a pinned tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    /// Human-readable tolerance, e.g. "|x| <= 4 SE = 0.0123".
    pub requirement: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, observed: f64, requirement: impl Into<String>) -> Verdict {
        Verdict {
            name: name.into(),
            passed,
            observed,
            requirement: requirement.into(),
        }
    }
}

/// Full comparison output; deterministic given `(config, seed)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample_summary: Option<SampleSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub transform_grids: Vec<TransformGridPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub distances: Vec<DistanceEntry>,
    pub verdicts: Vec<Verdict>,
}

impl ComparisonReport {
    pub fn new(config: ExperimentConfig) -> ComparisonReport {
        ComparisonReport {
            config,
            sample_summary: None,
            transform_grids: Vec::new(),
            distances: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evaluate an empirical transform on a grid against its analytic target;
/// the band is four standard errors per component.
pub fn compare_transform_grid(
    samples: &[f64],
    target: TransformTarget,
    grid: &[f64],
) -> Result<Vec<TransformGridPoint>> {
    let mut out = Vec::with_capacity(grid.len());
    for &point in grid {
        let entry = match target {
            TransformTarget::GfDiscrete { m } => {
                let ln_s = point.ln();
                let vals: Vec<f64> = samples
                    .iter()
                    .map(|&z| if point == 0.0 { f64::from(z == 0.0) } else { (z * ln_s).exp() })
                    .collect();
                let emp = mean_with_error(&vals);
                let theory = gf_discrete(m, point)?;
                grid_point(point, emp.mean, 0.0, theory, 0.0, emp.std_error, 0.0)
            }
            TransformTarget::CfContinuous => {
                let (re, im) = empirical_cf(samples, point);
                let (t_re, t_im) = cf_continuous(point);
                grid_point(point, re.mean, im.mean, t_re, t_im, re.std_error, im.std_error)
            }
            TransformTarget::LaplaceLevy { d, b, t } => {
                let emp = crate::stats::empirical_laplace(samples, point);
                let theory = (t * psi(d, b, point)?).exp();
                grid_point(point, emp.mean, 0.0, theory, 0.0, emp.std_error, 0.0)
            }
        };
        out.push(entry);
    }
    Ok(out)
}

fn grid_point(
    point: f64,
    empirical_re: f64,
    empirical_im: f64,
    theory_re: f64,
    theory_im: f64,
    std_error_re: f64,
    std_error_im: f64,
) -> TransformGridPoint {
    let within_re = (empirical_re - theory_re).abs() <= 4.0 * std_error_re;
    let within_im = std_error_im == 0.0 && empirical_im == theory_im
        || (empirical_im - theory_im).abs() <= 4.0 * std_error_im;
    TransformGridPoint {
        point,
        empirical_re,
        empirical_im,
        theory_re,
        theory_im,
        std_error_re,
        std_error_im,
        within_band: within_re && within_im,
    }
}

/// Two-sample Kolmogorov–Smirnov distance as a named entry.
pub fn compare_to_reference_samples(
    name: impl Into<String>,
    left: &[f64],
    right: &[f64],
) -> Result<DistanceEntry> {
    let ks = ks_two_sample(left, right)?;
    Ok(DistanceEntry {
        name: name.into(),
        statistic: ks.statistic,
        p_value: ks.p_value,
        n_left: left.len(),
        n_right: right.len(),
    })
}
