//! Natural-parameter posterior updates with density-based evidence.
//!
//! The vMF likelihood mean gets a conjugate vMF prior; an observation with
//! evidence (pseudo-count) `m` updates the prior by linear interpolation of
//! natural parameters:
//!
//! ```text
//! mu'0 = (kappa0 mu0 + m mu_c) / (kappa0 + m),   kappa'0 = kappa0 + m
//! ```
//!
//! The interpolated vector is not unit length whenever `mu0 != mu_c`, yet it
//! is used as a vMF mean, so [`posterior_update`] re-normalizes it and records
//! the pre-normalization norm. The returned concentration follows the additive
//! rule `kappa0 + m`, not the norm; the exact-conjugate alternative (where the
//! concentration is the natural-parameter norm) lives in
//! [`crate::vmf::conjugate_posterior`], so both semantics stay testable
//! against each other.
//!
//! Evidence comes from a feature density scaled by a certainty budget:
//! `m = N_H * p(z)`, clamped to a configurable cap to keep downstream entropy
//! and expected-log-likelihood evaluations finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{UnitVector3, Vec3};
use crate::vmf::VmfParams;

/// Default clamp for evidence pseudo-counts.
pub const DEFAULT_EVIDENCE_CAP: f64 = 1e6;

/// Evidence (pseudo-count) attached to one observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    m: f64,
    /// True when the raw value exceeded the cap and was clamped.
    clamped: bool,
}

impl Evidence {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("evidence"));
        }
        if m < 0.0 {
            return Err(Error::NegativeConcentration(m));
        }
        Ok(Self { m, clamped: false })
    }

    /// Zero evidence: the posterior stays at the prior.
    pub fn zero() -> Self {
        Self {
            m: 0.0,
            clamped: false,
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn is_clamped(&self) -> bool {
        self.clamped
    }
}

/// Scale factor N_H mapping feature density to evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertaintyBudget {
    n_h: f64,
}

impl CertaintyBudget {
    pub fn new(n_h: f64) -> Result<Self> {
        if !n_h.is_finite() {
            return Err(Error::NonFinite("certainty budget"));
        }
        if n_h <= 0.0 {
            return Err(Error::Parse(format!(
                "certainty budget must be positive, got {n_h}"
            )));
        }
        Ok(Self { n_h })
    }

    pub fn n_h(&self) -> f64 {
        self.n_h
    }
}

/// m = clamp(N_H * exp(log_density), 0, cap), with the default cap.
///
/// `log_density = -inf` maps to zero evidence (pure prior). NaN is rejected.
pub fn evidence_from_log_density(log_density: f64, budget: CertaintyBudget) -> Result<Evidence> {
    evidence_from_log_density_capped(log_density, budget, DEFAULT_EVIDENCE_CAP)
}

/// As [`evidence_from_log_density`] with an explicit cap.
pub fn evidence_from_log_density_capped(
    log_density: f64,
    budget: CertaintyBudget,
    cap: f64,
) -> Result<Evidence> {
    if log_density.is_nan() || log_density == f64::INFINITY {
        return Err(Error::NonFinite("log density"));
    }
    let raw = budget.n_h() * log_density.exp();
    let m = raw.min(cap);
    Ok(Evidence {
        m,
        clamped: raw > cap,
    })
}

/// Informative prior for a contact point: mean direction opposite the surface
/// normal (the expected support direction of contact forces), concentration 1.
pub fn informative_prior(surface_normal: UnitVector3) -> VmfParams {
    VmfParams::new(-surface_normal, 1.0).expect("kappa 1 is valid")
}

/// Result of a single posterior update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorUpdate {
    /// The posterior vMF: re-normalized mean, additive concentration.
    pub posterior: VmfParams,
    /// Norm of the interpolated (pre-normalization) mean vector; 1 exactly
    /// when prior mean and observation coincide, smaller otherwise.
    pub interp_norm: f64,
}

/// One-step natural-parameter update of `prior` by an observed likelihood
/// mean with evidence `ev`.
pub fn posterior_update(
    prior: &VmfParams,
    observed_mu: UnitVector3,
    ev: Evidence,
) -> Result<PosteriorUpdate> {
    let kappa0 = prior.kappa();
    let total = kappa0 + ev.m();
    if total <= 0.0 {
        return Err(Error::DegeneratePosterior(0.0));
    }
    if ev.m() == 0.0 {
        // no evidence: the posterior is the prior, bit for bit
        return Ok(PosteriorUpdate {
            posterior: *prior,
            interp_norm: 1.0,
        });
    }
    let interp = (prior.mu().scale(kappa0) + observed_mu.scale(ev.m())).scale(1.0 / total);
    let norm = interp.norm();
    if norm < 1e-12 {
        return Err(Error::DegeneratePosterior(norm));
    }
    Ok(PosteriorUpdate {
        posterior: VmfParams::new(interp.normalized()?, total)?,
        interp_norm: norm,
    })
}

/// Raw natural-parameter sums: `weighted_sum = kappa0 mu0 + sum(m_i mu_i)`,
/// `total_count = kappa0 + sum(m_i)`.
///
/// The sum form makes evidence combination associative and order-independent
/// up to float addition, and two accumulators merge by field-wise addition
/// (the supported parallel-reduction contract).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorAccumulator {
    weighted_sum: Vec3,
    total_count: f64,
}

impl PosteriorAccumulator {
    /// Start from a prior: (kappa0 mu0, kappa0).
    pub fn from_prior(prior: &VmfParams) -> Self {
        Self {
            weighted_sum: prior.mu().scale(prior.kappa()),
            total_count: prior.kappa(),
        }
    }

    /// Empty accumulator (no prior, no evidence).
    pub fn empty() -> Self {
        Self {
            weighted_sum: Vec3::ZERO,
            total_count: 0.0,
        }
    }

    /// Add one observation: `weighted_sum += m mu`, `total_count += m`.
    pub fn observe(&mut self, observed_mu: UnitVector3, ev: Evidence) {
        self.weighted_sum = self.weighted_sum + observed_mu.scale(ev.m());
        self.total_count += ev.m();
    }

    /// Field-wise merge of two accumulators.
    pub fn merge(&mut self, other: &PosteriorAccumulator) {
        self.weighted_sum = self.weighted_sum + other.weighted_sum;
        self.total_count += other.total_count;
    }

    pub fn weighted_sum(&self) -> Vec3 {
        self.weighted_sum
    }

    pub fn total_count(&self) -> f64 {
        self.total_count
    }

    /// Norm of the interpolated mean `weighted_sum / total_count`.
    pub fn interp_norm(&self) -> f64 {
        if self.total_count == 0.0 {
            return 0.0;
        }
        self.weighted_sum.norm() / self.total_count
    }

    /// Posterior vMF with re-normalized mean and additive concentration.
    pub fn finalize(&self) -> Result<VmfParams> {
        if self.total_count <= 0.0 {
            return Err(Error::DegeneratePosterior(0.0));
        }
        let norm = self.weighted_sum.norm();
        if norm / self.total_count < 1e-12 {
            return Err(Error::DegeneratePosterior(norm / self.total_count));
        }
        VmfParams::new(self.weighted_sum.normalized()?, self.total_count)
    }
}
