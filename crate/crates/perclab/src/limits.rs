//! Samplers and transform evaluators for the limit objects: the step law
//! `P(ξ = j) = 1/(j(j+1))`, its random walk, the discrete and continuous
//! Luria–Delbrück laws, and the Poisson random measure of rescaled cluster
//! sizes.

use crate::rng::Stream;
use crate::{Error, Result};

/// One step-law draw by exact inversion: `floor(1/U)` has
/// `P(ξ = j) = 1/j - 1/(j+1)` and tail `P(ξ >= j) = 1/j`.
#[inline]
pub fn sample_xi(rng: &mut Stream) -> u64 {
    let u = rng.open_uniform();
    let x = (1.0 / u).floor();
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x as u64
    }
}

/// Random walk with step law ξ.
#[derive(Debug, Clone)]
pub struct WalkPath {
    /// `sums[l] = S_l`, `sums[0] = 0`.
    pub sums: Vec<u64>,
}

impl WalkPath {
    /// `l^{-1} S_l - ln l` at the end of the path.
    pub fn centered(&self) -> f64 {
        let l = (self.sums.len() - 1) as f64;
        *self.sums.last().unwrap() as f64 / l - l.ln()
    }

    /// First passage `min{l : S_l >= level}`, if reached on this path.
    pub fn first_passage(&self, level: u64) -> Option<u64> {
        self.sums.iter().position(|&s| s >= level).map(|l| l as u64)
    }
}

/// Sample the walk path `S_0, .., S_steps`.
pub fn walk(steps: u64, rng: &mut Stream) -> Result<WalkPath> {
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let mut sums = Vec::with_capacity(steps as usize + 1);
    let mut s = 0u64;
    sums.push(0);
    for _ in 0..steps {
        s = s.saturating_add(sample_xi(rng));
        sums.push(s);
    }
    Ok(WalkPath { sums })
}

/// The centered statistic `l^{-1} S_l - ln l` without storing the path.
pub fn walk_centered_statistic(steps: u64, rng: &mut Stream) -> Result<f64> {
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let mut s = 0u64;
    for _ in 0..steps {
        s = s.saturating_add(sample_xi(rng));
    }
    let l = steps as f64;
    Ok(s as f64 / l - l.ln())
}

/// Discrete Luria–Delbrück draw `Z_m`: a compound Poisson(m) sum of
/// step-law jumps; generating function `(1-s)^{m(1-s)/s}`.
pub fn sample_ld_discrete(m: f64, rng: &mut Stream) -> Result<u64> {
    if m < 0.0 || !m.is_finite() {
        return Err(Error::invalid("m", "parameter must be nonnegative"));
    }
    let jumps = rng.poisson(m);
    let mut z = 0u64;
    for _ in 0..jumps {
        z = z.saturating_add(sample_xi(rng));
    }
    Ok(z)
}

/// Generating function of `Z_m` at `s ∈ [0, 1)`: `(1-s)^{m(1-s)/s}`,
/// with the continuous extension `e^{-m}` at `s = 0`.
pub fn gf_discrete(m: f64, s: f64) -> Result<f64> {
    if m < 0.0 || !m.is_finite() {
        return Err(Error::invalid("m", "parameter must be nonnegative"));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::invalid("s", "generating function needs s in [0, 1)"));
    }
    if s == 0.0 {
        return Ok((-m).exp());
    }
    Ok((m * (1.0 - s) / s * (1.0 - s).ln()).exp())
}

/// Characteristic function of the continuous Luria–Delbrück law,
/// `exp(-(π/2)|θ| - iθ ln|θ|)`, as `(re, im)`; `θ = 0` maps to 1.
pub fn cf_continuous(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        return (1.0, 0.0);
    }
    let modulus = (-std::f64::consts::FRAC_PI_2 * theta.abs()).exp();
    let phase = -theta * theta.abs().ln();
    (modulus * phase.cos(), modulus * phase.sin())
}

/// How to draw from the continuous Luria–Delbrück law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousMethod {
    /// `Z_m/m - ln m` for a large finite `m`; the reference of record,
    /// with O(ln m / m) bias.
    ScaledDiscrete { m: f64 },
    /// Chambers–Mallows–Stuck draw from the spectrally positive 1-stable
    /// family, scaled and shifted onto the displayed characteristic
    /// function.
    StableTransform,
}

/// Draw from the continuous Luria–Delbrück law `Z`.
pub fn sample_ld_continuous(method: ContinuousMethod, rng: &mut Stream) -> Result<f64> {
    match method {
        ContinuousMethod::ScaledDiscrete { m } => {
            if m < 1.0 {
                return Err(Error::invalid("m", "scaled-discrete sampling needs m >= 1"));
            }
            let z = sample_ld_discrete(m, rng)?;
            Ok(z as f64 / m - m.ln())
        }
        ContinuousMethod::StableTransform => {
            // CMS for alpha = 1, beta = 1: X ~ S(1, 1; 1), i.e. with
            // characteristic function exp(-|t|(1 + i (2/π) sgn t ln|t|)).
            // Then (π/2) X + ln(π/2) has the displayed transform.
            let u = std::f64::consts::PI * (rng.open_uniform() - 0.5); // (-π/2, π/2)
            let w = rng.exponential();
            let half_pi = std::f64::consts::FRAC_PI_2;
            let shifted = half_pi + u;
            let x = std::f64::consts::FRAC_2_PI
                * (shifted * u.tan() - (half_pi * w * u.cos() / shifted).ln());
            Ok(half_pi * x + half_pi.ln())
        }
    }
}

/// Atoms above `xmin` of the Poisson random measure with intensity
/// `c e^{-c} x^{-2} dx`, ranked nonincreasing.
#[derive(Debug, Clone)]
pub struct ClusterAtoms {
    pub c: f64,
    pub xmin: f64,
    pub atoms: Vec<f64>,
}

/// Sample the cluster-size atoms: the count is Poisson with mean
/// `c e^{-c} / xmin` and each atom is `xmin / U` (density proportional to
/// `x^{-2}` beyond the truncation).
pub fn sample_cluster_atoms(c: f64, xmin: f64, rng: &mut Stream) -> Result<ClusterAtoms> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid("c", "intensity must be positive"));
    }
    if !xmin.is_finite() || xmin <= 0.0 {
        return Err(Error::invalid("xmin", "truncation must be positive"));
    }
    let count = rng.poisson(c * (-c).exp() / xmin);
    let mut atoms: Vec<f64> = (0..count).map(|_| xmin / rng.open_uniform()).collect();
    atoms.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(ClusterAtoms { c, xmin, atoms })
}

/// The functional `X_n = Σ floor((n/ln n) x_i)` over the atoms with the
/// paper's effective truncation `xmin = ln n / n`; equal in law to `Z_m`
/// with `m = c e^{-c} n / ln n`.
pub fn sample_xn(n: u64, c: f64, rng: &mut Stream) -> Result<u64> {
    if n < 3 {
        return Err(Error::invalid("n", "X_n needs n >= 3"));
    }
    let scale = n as f64 / (n as f64).ln();
    let atoms = sample_cluster_atoms(c, 1.0 / scale, rng)?;
    Ok(atoms
        .atoms
        .iter()
        .map(|&x| (scale * x).floor() as u64)
        .sum())
}
