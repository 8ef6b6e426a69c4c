//! Power Spherical distribution on S^2, used as a fast sampling surrogate for
//! vMF posteriors in Monte-Carlo estimation.
//!
//! Density proportional to `(1 + mu^T x)^kappa`. For the 2-sphere the
//! normalizer reduces to `N(kappa) = 2^(kappa+2) pi / (kappa + 1)`, so no
//! log-Gamma evaluations are needed. The cosine `t = mu^T x` satisfies
//! `(t + 1)/2 ~ Beta(kappa + 1, 1)`, which gives the closed-form moment
//! `E[mu^T x] = kappa / (kappa + 2)` and a branch-free inverse-CDF sampler.
//! Sampling-only: no conjugate update is provided for this family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sphere::{UnitVector3, Vec3};
use crate::vmf::VmfParams;

/// Mean direction and concentration of a Power Spherical distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsParams {
    mu: UnitVector3,
    kappa: f64,
}

impl PsParams {
    pub fn new(mu: UnitVector3, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::NonFinite("kappa"));
        }
        if kappa < 0.0 {
            return Err(Error::NegativeConcentration(kappa));
        }
        Ok(Self { mu, kappa })
    }

    pub fn mu(&self) -> UnitVector3 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// log N(kappa) = (kappa + 2) log 2 + log pi - log(kappa + 1).
    pub fn log_normalizer(&self) -> f64 {
        (self.kappa + 2.0) * std::f64::consts::LN_2 + std::f64::consts::PI.ln()
            - (self.kappa + 1.0).ln()
    }

    /// kappa log1p(mu^T x) - log N(kappa).
    ///
    /// Returns -inf at the antipode of `mu` when kappa > 0 (a valid
    /// log-density limit).
    pub fn log_pdf(&self, x: UnitVector3) -> f64 {
        if self.kappa == 0.0 {
            return -crate::special::LN_4PI;
        }
        self.kappa * self.mu.dot(x).ln_1p() - self.log_normalizer()
    }

    /// Exact draw (2 uniforms per sample): `z = u^(1/(kappa+1))` inverts the
    /// Beta(kappa+1, 1) CDF, then the polar construction around the z-axis is
    /// reflected onto `mu` by the Householder map sending (0,0,1) to `mu`.
    pub fn sample_one(&self, rng: &mut RandomStream) -> UnitVector3 {
        let u = rng.next_f64();
        let z = u.powf(1.0 / (self.kappa + 1.0));
        let t = 2.0 * z - 1.0;
        let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
        let r = (1.0 - t * t).max(0.0).sqrt();
        let y = Vec3::new(r * phi.cos(), r * phi.sin(), t);
        reflect_pole_to(self.mu, y)
            .normalized()
            .expect("householder preserves norm")
    }

    pub fn sample(&self, n: usize, rng: &mut RandomStream) -> Vec<UnitVector3> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

/// Reinterpret vMF parameters as a Power Spherical surrogate with the same
/// (mu, kappa).
pub fn surrogate_from_vmf(v: &VmfParams) -> PsParams {
    PsParams {
        mu: v.mu(),
        kappa: v.kappa(),
    }
}

impl From<&VmfParams> for PsParams {
    fn from(v: &VmfParams) -> Self {
        surrogate_from_vmf(v)
    }
}

/// Householder reflection mapping the pole (0,0,1) onto `mu`, applied to `y`.
/// Degenerates to the identity when `mu` is (numerically) the pole itself.
fn reflect_pole_to(mu: UnitVector3, y: Vec3) -> Vec3 {
    let diff = Vec3::new(mu.x(), mu.y(), mu.z() - 1.0);
    let norm = diff.norm();
    if norm < 1e-9 {
        return y;
    }
    let v = diff.scale(1.0 / norm);
    y - v.scale(2.0 * v.dot(y))
}
