//! Deterministic random streams for reproducible parallel Monte Carlo.
//!
//! Every stochastic operation in this crate takes an explicit [`Stream`].
//! A stream is a counter-based SplitMix-style generator: the state is a
//! 64-bit counter advanced by a per-stream odd increment, and each output
//! is a bijective mix of the counter. Replica streams derive purely from
//! `(seed, replica_index)`, so replicas can run in any order on any number
//! of workers and still produce identical values.

use statrs::function::gamma::ln_gamma;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TWO_POW_NEG53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Trial-count threshold above which binomial sampling switches from exact
/// inversion to the normal approximation with continuity correction.
pub const BINOMIAL_EXACT_MAX_TRIALS: u64 = 100_000;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// Increment candidates need to be odd and not too regular; same fixup as
// SplittableRandom's mixGamma.
#[inline]
fn mix_gamma(z: u64) -> u64 {
    let g = mix64(z) | 1;
    if (g ^ (g >> 1)).count_ones() < 24 {
        g ^ 0xAAAA_AAAA_AAAA_AAAA
    } else {
        g
    }
}

/// Derive an unrelated 64-bit seed from a base seed and a salt.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    mix64(seed ^ mix64(salt.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)))
}

/// Splittable counter-based random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
    gamma: u64,
    spare_normal: Option<f64>,
}

impl Stream {
    /// Root stream for a seed.
    pub fn from_seed(seed: u64) -> Stream {
        Stream {
            state: mix64(seed ^ 0x6A09_E667_F3BC_C909),
            gamma: mix_gamma(seed.wrapping_add(GOLDEN)),
            spare_normal: None,
        }
    }

    /// Stream for replica `index` of a run seeded with `seed`.
    ///
    /// Purely a function of `(seed, index)`: no coordination between
    /// replicas is needed and the assignment of replicas to workers cannot
    /// change the values drawn.
    pub fn substream(seed: u64, index: u64) -> Stream {
        let base = mix64(seed).wrapping_add(index.wrapping_mul(GOLDEN));
        Stream {
            state: mix64(base ^ 0xBB67_AE85_84CA_A73B),
            gamma: mix_gamma(base.wrapping_add(mix64(index ^ seed.rotate_left(17)))),
            spare_normal: None,
        }
    }

    /// Split off an independent child stream.
    pub fn split(&mut self) -> Stream {
        let s = self.next_u64();
        let g = self.next_u64();
        Stream {
            state: mix64(s),
            gamma: mix_gamma(g),
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(self.gamma);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG53
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn open_uniform(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Unbiased uniform draw from `{0, 1, .., n-1}` (Lemire's method).
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let mut x = self.next_u64();
        let mut m = (x as u128) * (n as u128);
        let mut lo = m as u64;
        if lo < n {
            let t = n.wrapping_neg() % n;
            while lo < t {
                x = self.next_u64();
                m = (x as u128) * (n as u128);
                lo = m as u64;
            }
        }
        (m >> 64) as u64
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard exponential (rate 1), strictly positive.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.open_uniform().ln()
    }

    /// Standard normal via the Box–Muller transform; the second value of
    /// each pair is cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let r = (-2.0 * self.open_uniform().ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
        self.spare_normal = Some(r * s);
        r * c
    }

    /// Poisson draw. Product-of-uniforms for small means, Hörmann's PTRS
    /// transformed rejection for large ones.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        assert!(lambda >= 0.0 && lambda.is_finite(), "invalid Poisson mean");
        if lambda == 0.0 {
            0
        } else if lambda < 30.0 {
            let limit = (-lambda).exp();
            let mut k = 0u64;
            let mut prod = self.uniform();
            while prod > limit {
                prod *= self.uniform();
                k += 1;
            }
            k
        } else {
            self.poisson_ptrs(lambda)
        }
    }

    fn poisson_ptrs(&mut self, lambda: f64) -> u64 {
        let b = 0.931 + 2.53 * lambda.sqrt();
        let a = -0.059 + 0.024_83 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        let ln_lambda = lambda.ln();
        loop {
            let u = self.uniform() - 0.5;
            let v = self.open_uniform();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
            let rhs = k * ln_lambda - lambda - ln_gamma(k + 1.0);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }

    /// Binomial draw with `n` trials and success probability `p`.
    ///
    /// Exact inversion (walked outward from the mode so the starting mass
    /// never underflows) up to [`BINOMIAL_EXACT_MAX_TRIALS`] trials, normal
    /// approximation with continuity correction above.
    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        assert!((0.0..=1.0).contains(&p), "binomial p outside [0,1]");
        if n == 0 || p == 0.0 {
            return 0;
        }
        if p == 1.0 {
            return n;
        }
        if p > 0.5 {
            return n - self.binomial(n, 1.0 - p);
        }
        if n <= BINOMIAL_EXACT_MAX_TRIALS {
            self.binomial_inversion(n, p)
        } else {
            let nf = n as f64;
            let mean = nf * p;
            let sd = (nf * p * (1.0 - p)).sqrt();
            let x = (mean + sd * self.standard_normal() + 0.5).floor();
            (x.max(0.0) as u64).min(n)
        }
    }

    // Exact CDF inversion started at the mode. Expected number of pmf steps
    // is O(sqrt(n p (1-p))).
    fn binomial_inversion(&mut self, n: u64, p: f64) -> u64 {
        let nf = n as f64;
        let q = 1.0 - p;
        let ratio = p / q;
        let mode = ((nf + 1.0) * p).floor().min(nf);
        let ln_pmf_mode = ln_gamma(nf + 1.0) - ln_gamma(mode + 1.0) - ln_gamma(nf - mode + 1.0)
            + mode * p.ln()
            + (nf - mode) * q.ln();
        let pmf_mode = ln_pmf_mode.exp();

        let mut u = self.uniform();
        if u <= pmf_mode {
            return mode as u64;
        }
        u -= pmf_mode;
        let mut hi = mode;
        let mut pmf_hi = pmf_mode;
        let mut lo = mode;
        let mut pmf_lo = pmf_mode;
        loop {
            let mut advanced = false;
            if hi < nf {
                pmf_hi *= (nf - hi) / (hi + 1.0) * ratio;
                hi += 1.0;
                advanced = true;
                if u <= pmf_hi {
                    return hi as u64;
                }
                u -= pmf_hi;
            }
            if lo > 0.0 {
                pmf_lo *= lo / (nf - lo + 1.0) / ratio;
                lo -= 1.0;
                advanced = true;
                if u <= pmf_lo {
                    return lo as u64;
                }
                u -= pmf_lo;
            }
            if !advanced {
                // Floating-point residue exhausted the support.
                return mode as u64;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = Stream::substream(42, 7);
        let mut b = Stream::substream(42, 7);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substreams_differ() {
        let a: Vec<u64> = {
            let mut s = Stream::substream(42, 0);
            (0..16).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = Stream::substream(42, 1);
            (0..16).map(|_| s.next_u64()).collect()
        };
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = Stream::from_seed(1);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn below_is_unbiased_small_range() {
        let mut s = Stream::from_seed(3);
        let n = 7u64;
        let draws = 700_000;
        let mut counts = [0u64; 7];
        for _ in 0..draws {
            counts[s.below(n) as usize] += 1;
        }
        let expect = draws as f64 / n as f64;
        let se = (expect * (1.0 - 1.0 / n as f64)).sqrt();
        for &c in &counts {
            assert!((c as f64 - expect).abs() < 5.0 * se, "count {c} vs {expect}");
        }
    }

    #[test]
    fn normal_moments() {
        let mut s = Stream::from_seed(11);
        let n = 200_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let z = s.standard_normal();
            sum += z;
            sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn exponential_moments() {
        let mut s = Stream::from_seed(12);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let e = s.exponential();
            assert!(e > 0.0);
            sum += e;
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn poisson_moments_small_and_large() {
        for &lambda in &[0.5, 3.0, 40.0, 3000.0] {
            let mut s = Stream::from_seed(13);
            let n = 100_000;
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..n {
                let k = s.poisson(lambda) as f64;
                sum += k;
                sq += k * k;
            }
            let mean = sum / n as f64;
            let var = sq / n as f64 - mean * mean;
            let se = (lambda / n as f64).sqrt();
            assert!((mean - lambda).abs() < 5.0 * se, "lambda {lambda} mean {mean}");
            assert!(
                (var - lambda).abs() < 0.05 * lambda.max(1.0),
                "lambda {lambda} var {var}"
            );
        }
    }

    #[test]
    fn binomial_moments_across_regimes() {
        // Spans exact inversion (small and large np) and the normal branch.
        for &(n, p) in &[(40u64, 0.3), (1000, 0.77), (100_000, 0.5), (10_000_000, 0.2)] {
            let mut s = Stream::from_seed(14);
            let reps = 40_000;
            let mut sum = 0.0;
            let mut sq = 0.0;
            for _ in 0..reps {
                let k = s.binomial(n, p) as f64;
                sum += k;
                sq += k * k;
            }
            let mean = sum / reps as f64;
            let var = sq / reps as f64 - mean * mean;
            let target_mean = n as f64 * p;
            let target_var = n as f64 * p * (1.0 - p);
            let se = (target_var / reps as f64).sqrt();
            assert!(
                (mean - target_mean).abs() < 5.0 * se,
                "n={n} p={p} mean {mean} vs {target_mean}"
            );
            assert!(
                (var - target_var).abs() < 0.05 * target_var,
                "n={n} p={p} var {var} vs {target_var}"
            );
        }
    }

    #[test]
    fn binomial_edge_cases() {
        let mut s = Stream::from_seed(15);
        assert_eq!(s.binomial(0, 0.4), 0);
        assert_eq!(s.binomial(10, 0.0), 0);
        assert_eq!(s.binomial(10, 1.0), 10);
        for _ in 0..100 {
            let k = s.binomial(5, 0.5);
            assert!(k <= 5);
        }
    }

    #[test]
    fn binomial_exact_pmf_small_case() {
        // n=4, p=0.3: pmf = (0.2401, 0.4116, 0.2646, 0.0756, 0.0081)
        let mut s = Stream::from_seed(16);
        let reps = 400_000;
        let mut counts = [0u64; 5];
        for _ in 0..reps {
            counts[s.binomial(4, 0.3) as usize] += 1;
        }
        let pmf = [0.2401, 0.4116, 0.2646, 0.0756, 0.0081];
        for (k, &target) in pmf.iter().enumerate() {
            let freq = counts[k] as f64 / reps as f64;
            let se = (target * (1.0 - target) / reps as f64).sqrt();
            assert!((freq - target).abs() < 5.0 * se, "k={k} freq {freq}");
        }
    }

    #[test]
    fn split_produces_distinct_streams() {
        let mut root = Stream::from_seed(9);
        let mut a = root.split();
        let mut b = root.split();
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }
}
