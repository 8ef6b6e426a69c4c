//! Monte-Carlo verification harness.
//!
//! Stochastic estimators with standard errors for every closed-form quantity
//! in the crate. Estimation is chunked: chunk `i` always consumes the `i`-th
//! sub-stream of the supplied [`RandomStream`] and per-chunk moments are
//! combined in chunk order, so a fixed `(seed, samples, sampler)` triple gives
//! bit-identical results whether chunks run serially or in parallel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power_spherical::surrogate_from_vmf;
use crate::rng::RandomStream;
use crate::sphere::UnitVector3;
use crate::vmf::VmfParams;

/// Samples per chunk. Fixed so chunk boundaries never depend on thread count.
pub const CHUNK: usize = 8192;

/// Which distribution draws the posterior samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Exact vMF inversion sampler.
    Vmf,
    /// Power Spherical surrogate with the same parameters.
    Ps,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vmf" => Ok(SamplerKind::Vmf),
            "ps" => Ok(SamplerKind::Ps),
            other => Err(Error::Parse(format!("unknown sampler kind: {other}"))),
        }
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Streaming mean/M2 state (Welford). Identical inputs leave M2 at exactly
/// zero, so constant integrands report a standard error of exactly zero.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan's pairwise combination; applied in chunk order.
    fn combine(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count / total;
        self.m2 += other.m2 + delta * delta * self.count * other.count / total;
        self.count = total;
    }

    fn estimate(&self) -> McEstimate {
        let n = self.count;
        let var = if n > 1.0 { (self.m2 / (n - 1.0)).max(0.0) } else { 0.0 };
        McEstimate {
            value: self.mean,
            std_error: (var / n).sqrt(),
            samples: n as usize,
        }
    }
}

/// Deterministic chunked estimation of `mean f(x)`, `x` drawn by `draw`.
fn chunked_estimate<F>(samples: usize, rng: &RandomStream, mut draw: F) -> McEstimate
where
    F: FnMut(&mut RandomStream) -> f64,
{
    let mut total = Moments::default();
    let chunks = samples.div_ceil(CHUNK);
    for c in 0..chunks {
        let mut sub = rng.substream(c as u64);
        let this_chunk = CHUNK.min(samples - c * CHUNK);
        let mut local = Moments::default();
        for _ in 0..this_chunk {
            local.push(draw(&mut sub));
        }
        total.combine(&local);
    }
    total.estimate()
}

/// Per-chunk moments, exposed so callers can run chunks on worker threads and
/// combine them in order; the result is bit-identical to the serial path.
pub fn chunk_moments_expected_loglik(
    post: &VmfParams,
    lik_kappa: f64,
    target: UnitVector3,
    samples: usize,
    rng: &RandomStream,
    sampler: SamplerKind,
    chunk_index: usize,
) -> (f64, f64, f64) {
    let mut sub = rng.substream(chunk_index as u64);
    let start = chunk_index * CHUNK;
    let this_chunk = CHUNK.min(samples.saturating_sub(start));
    let logz = crate::special::log_norm_const(lik_kappa).expect("kappa validated");
    let ps = surrogate_from_vmf(post);
    let mut local = Moments::default();
    for _ in 0..this_chunk {
        let mu = match sampler {
            SamplerKind::Vmf => post.sample_one(&mut sub),
            SamplerKind::Ps => ps.sample_one(&mut sub),
        };
        local.push(logz + lik_kappa * target.dot(mu));
    }
    (local.count, local.mean, local.m2)
}

/// MC estimate of the expected log-likelihood
/// `E[log vMF(target; mu, lik_kappa)]` with `mu` drawn from `post` by the
/// chosen sampler.
pub fn mc_expected_loglik(
    post: &VmfParams,
    lik_kappa: f64,
    target: UnitVector3,
    samples: usize,
    rng: &RandomStream,
    sampler: SamplerKind,
) -> Result<McEstimate> {
    if samples < 100 {
        return Err(Error::TooFewSamples {
            min: 100,
            got: samples,
        });
    }
    let logz = crate::special::log_norm_const(lik_kappa)?;
    let ps = surrogate_from_vmf(post);
    Ok(chunked_estimate(samples, rng, |sub| {
        let mu = match sampler {
            SamplerKind::Vmf => post.sample_one(sub),
            SamplerKind::Ps => ps.sample_one(sub),
        };
        logz + lik_kappa * target.dot(mu)
    }))
}

/// MC estimate of the entropy `-E[log p(x)]`, `x ~ p`.
pub fn mc_entropy(p: &VmfParams, samples: usize, rng: &RandomStream) -> Result<McEstimate> {
    if samples < 100 {
        return Err(Error::TooFewSamples {
            min: 100,
            got: samples,
        });
    }
    Ok(chunked_estimate(samples, rng, |sub| {
        let x = p.sample_one(sub);
        -p.log_pdf(x)
    }))
}

/// |analytic - estimate| / SE. A zero standard error short-circuits to exact
/// comparison: 0 when equal, infinity otherwise.
pub fn z_score(analytic: f64, est: &McEstimate) -> f64 {
    if est.std_error == 0.0 {
        return if analytic == est.value { 0.0 } else { f64::INFINITY };
    }
    (analytic - est.value).abs() / est.std_error
}

/// One row of a verification grid run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridPoint {
    pub kappa_post: f64,
    pub kappa_lik: f64,
    pub dot: f64,
    pub analytic: f64,
    pub mc_value: f64,
    pub std_error: f64,
    pub z: f64,
}

/// The default verification grid:
/// kappa_post in {0.1, 1, 2, 5, 50} x kappa_lik in {0.5, 2, 5, 10} x
/// dot in {-1, 0, 0.5, 0.8, 1}.
pub fn default_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::with_capacity(100);
    for &kp in &[0.1, 1.0, 2.0, 5.0, 50.0] {
        for &kl in &[0.5, 2.0, 5.0, 10.0] {
            for &dot in &[-1.0, 0.0, 0.5, 0.8, 1.0] {
                grid.push((kp, kl, dot));
            }
        }
    }
    grid
}

/// Run the analytic-vs-MC expected-log-likelihood verification over a grid.
///
/// Each grid point gets its own sub-stream (indexed by grid position), so the
/// whole run is deterministic in `(seed, samples, sampler)`.
pub fn verify_ell_grid(
    grid: &[(f64, f64, f64)],
    samples: usize,
    rng: &RandomStream,
    sampler: SamplerKind,
) -> Result<Vec<GridPoint>> {
    let mut out = Vec::with_capacity(grid.len());
    for (i, &(kappa_post, kappa_lik, dot)) in grid.iter().enumerate() {
        let post = VmfParams::new(UnitVector3::Z, kappa_post)?;
        let target = UnitVector3::new((1.0 - dot * dot).max(0.0).sqrt(), 0.0, dot)?;
        let analytic = crate::losses::expected_log_likelihood(&post, kappa_lik, target)?;
        let est = mc_expected_loglik(
            &post,
            kappa_lik,
            target,
            samples,
            &rng.substream(i as u64),
            sampler,
        )?;
        out.push(GridPoint {
            kappa_post,
            kappa_lik,
            dot,
            analytic,
            mc_value: est.value,
            std_error: est.std_error,
            z: z_score(analytic, &est),
        });
    }
    Ok(out)
}

/// Fraction of grid points with z below the given threshold.
pub fn pass_fraction(points: &[GridPoint], z_threshold: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    points.iter().filter(|p| p.z < z_threshold).count() as f64 / points.len() as f64
}
