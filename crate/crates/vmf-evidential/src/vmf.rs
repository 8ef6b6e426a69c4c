//! The von Mises-Fisher distribution on S^2.
//!
//! Density `vMF(x; mu, kappa) = Z(kappa) exp(kappa mu^T x)` with
//! `Z(kappa) = kappa / (4 pi sinh kappa)`. Serves as likelihood, conjugate
//! prior, and posterior throughout the crate. `kappa = 0` is the uniform
//! distribution on the sphere (`mu` is then arbitrary but still unit).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::special::{a3, log_norm_const};
use crate::sphere::{uniform_sphere, UnitVector3, Vec3};

/// Mean direction and concentration of a 3-D vMF distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VmfParams {
    mu: UnitVector3,
    kappa: f64,
}

impl VmfParams {
    pub fn new(mu: UnitVector3, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::NonFinite("kappa"));
        }
        if kappa < 0.0 {
            return Err(Error::NegativeConcentration(kappa));
        }
        Ok(Self { mu, kappa })
    }

    /// Uniform distribution on the sphere (kappa = 0).
    pub fn uniform() -> Self {
        Self {
            mu: UnitVector3::Z,
            kappa: 0.0,
        }
    }

    pub fn mu(&self) -> UnitVector3 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// log vMF(x; mu, kappa) = log Z(kappa) + kappa mu^T x.
    pub fn log_pdf(&self, x: UnitVector3) -> f64 {
        let logz = log_norm_const(self.kappa).expect("kappa validated at construction");
        logz + self.kappa * self.mu.dot(x)
    }

    /// Exact inverse-CDF draw (2 uniforms per sample).
    ///
    /// The cosine of the polar angle around `mu` has CDF proportional to
    /// `e^{kappa t}` on [-1, 1]; in log space the inverse is
    /// `t = 1 + log(u + (1-u) e^{-2 kappa}) / kappa`.
    pub fn sample_one(&self, rng: &mut RandomStream) -> UnitVector3 {
        if self.kappa < 1e-6 {
            return uniform_sphere(rng);
        }
        let u = rng.next_f64();
        let w = (1.0 + (u + (1.0 - u) * (-2.0 * self.kappa).exp()).ln() / self.kappa).max(-1.0);
        let (e1, e2) = self.mu.orthonormal_basis();
        let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
        let r = (1.0 - w * w).max(0.0).sqrt();
        let v = self.mu.scale(w) + e1.scale(r * phi.cos()) + e2.scale(r * phi.sin());
        v.normalized().expect("sample construction is unit")
    }

    pub fn sample(&self, n: usize, rng: &mut RandomStream) -> Vec<UnitVector3> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// Differential entropy: -log Z(kappa) - kappa coth(kappa) + 1.
    ///
    /// The kappa -> 0 limit log(4 pi) is taken continuously.
    pub fn entropy(&self) -> f64 {
        if self.kappa == 0.0 {
            return crate::special::LN_4PI;
        }
        let logz = log_norm_const(self.kappa).expect("kappa validated at construction");
        // kappa * coth(kappa) = kappa * a3(kappa) + 1
        let k_coth_k = self.kappa * a3(self.kappa).expect("kappa validated") + 1.0;
        -logz - k_coth_k + 1.0
    }
}

/// Exact conjugate posterior for the vMF mean with fixed likelihood
/// concentration: `theta = kappa0 mu0 + kappa sum(x_i)`, posterior
/// `vMF(theta/|theta|, |theta|)`.
pub fn conjugate_posterior(
    prior: &VmfParams,
    lik_kappa: f64,
    data: &[UnitVector3],
) -> Result<VmfParams> {
    if !lik_kappa.is_finite() {
        return Err(Error::NonFinite("lik_kappa"));
    }
    if lik_kappa < 0.0 {
        return Err(Error::NegativeConcentration(lik_kappa));
    }
    let mut theta = prior.mu().scale(prior.kappa());
    for x in data {
        theta = theta + x.scale(lik_kappa);
    }
    let norm = theta.norm();
    if norm < 1e-12 {
        return Err(Error::DegeneratePosterior(norm));
    }
    VmfParams::new(theta.normalized()?, norm)
}

/// MAP estimate of the vMF mean: the direction of the combined natural
/// parameter theta.
pub fn map_estimate(
    prior: &VmfParams,
    lik_kappa: f64,
    data: &[UnitVector3],
) -> Result<UnitVector3> {
    Ok(conjugate_posterior(prior, lik_kappa, data)?.mu())
}

/// Resultant length of the empirical mean of a batch of unit vectors.
pub fn mean_resultant_length(xs: &[UnitVector3]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let sum = xs
        .iter()
        .fold(Vec3::ZERO, |acc, x| acc + x.as_vec3());
    sum.norm() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::LN_4PI;
    use crate::sphere::align_rotation;

    // frozen from a 50-digit offline evaluation
    const LOG_PDF_K1_AT_MU: f64 = -1.6924636085404864;
    const ENTROPY_1: f64 = 2.379_428_323_041_155;
    const A3_5: f64 = 0.8000908039820194;

    #[test]
    fn params_validate_kappa() {
        assert!(VmfParams::new(UnitVector3::Z, -1.0).is_err());
        assert!(VmfParams::new(UnitVector3::Z, f64::NAN).is_err());
        assert!(VmfParams::new(UnitVector3::Z, 0.0).is_ok());
    }

    #[test]
    fn log_pdf_uniform_case() {
        let p = VmfParams::uniform();
        let mut rng = RandomStream::new(1);
        for _ in 0..10 {
            let x = uniform_sphere(&mut rng);
            assert_eq!(p.log_pdf(x), -LN_4PI);
        }
    }

    #[test]
    fn log_pdf_at_mode() {
        let p = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
        let v = p.log_pdf(UnitVector3::Z);
        assert!((v - LOG_PDF_K1_AT_MU).abs() < 1e-14);
    }

    #[test]
    fn log_pdf_normalizes_by_mc() {
        // (4 pi / S) sum exp(log_pdf(x_s)) over uniform x_s should be 1 +- 3 SE
        let mut rng = RandomStream::new(9);
        for kappa in [0.0, 0.5, 2.0, 10.0] {
            let p = VmfParams::new(UnitVector3::new(1.0, 1.0, 0.5).unwrap(), kappa).unwrap();
            let s = 200_000;
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..s {
                let x = uniform_sphere(&mut rng);
                let f = 4.0 * std::f64::consts::PI * p.log_pdf(x).exp();
                sum += f;
                sq += f * f;
            }
            let mean = sum / s as f64;
            let var = (sq / s as f64 - mean * mean).max(0.0);
            let se = (var / s as f64).sqrt();
            assert!(
                (mean - 1.0).abs() < 3.0 * se.max(1e-9),
                "kappa={kappa}: integral={mean}, se={se}"
            );
        }
    }

    #[test]
    fn sampler_uniform_when_kappa_zero() {
        let p = VmfParams::uniform();
        let mut rng = RandomStream::new(4);
        let xs = p.sample(100_000, &mut rng);
        assert!(mean_resultant_length(&xs) < 0.01);
    }

    #[test]
    fn sampler_matches_a3_moment() {
        let mut rng = RandomStream::new(12);
        let n = 100_000;
        let tol = 3.0 / (n as f64).sqrt();
        for kappa in [0.1, 1.0, 5.0, 50.0] {
            let p = VmfParams::new(UnitVector3::new(0.3, -0.4, 0.8).unwrap(), kappa).unwrap();
            let xs = p.sample(n, &mut rng);
            let r = mean_resultant_length(&xs);
            let expect = a3(kappa).unwrap();
            assert!(
                (r - expect).abs() < tol,
                "kappa={kappa}: resultant {r} vs a3 {expect}"
            );
        }
        // kappa = 5 mean direction recovery
        let p = VmfParams::new(UnitVector3::Z, 5.0).unwrap();
        let xs = p.sample(n, &mut rng);
        let sum = xs.iter().fold(Vec3::ZERO, |a, x| a + x.as_vec3());
        let dir = sum.normalized().unwrap();
        assert!(dir.angle_to(UnitVector3::Z) < 0.02);
        let _ = A3_5; // referenced by the doc example below
        assert!((a3(5.0).unwrap() - A3_5).abs() < 1e-14);
    }

    #[test]
    fn sampler_deterministic() {
        let p = VmfParams::new(UnitVector3::X, 3.0).unwrap();
        let a = p.sample(10, &mut RandomStream::new(7));
        let b = p.sample(10, &mut RandomStream::new(7));
        assert_eq!(a, b);
    }

    #[test]
    fn entropy_reference_points() {
        assert_eq!(VmfParams::uniform().entropy(), LN_4PI);
        let h1 = VmfParams::new(UnitVector3::Z, 1.0).unwrap().entropy();
        assert!((h1 - ENTROPY_1).abs() < 1e-14);
    }

    #[test]
    fn entropy_monotone_decreasing_in_kappa() {
        let h = |k: f64| VmfParams::new(UnitVector3::Z, k).unwrap().entropy();
        assert!(h(10.0) < h(1.0));
        assert!(h(1.0) < h(0.1));
        assert!(h(0.1) < h(0.0));
    }

    #[test]
    fn entropy_matches_mc() {
        // -mean(log_pdf) over samples from p, within 3 SE
        let mut rng = RandomStream::new(21);
        for kappa in [1.0, 50.0] {
            let p = VmfParams::new(UnitVector3::new(-0.2, 0.9, 0.4).unwrap(), kappa).unwrap();
            let s = 1_000_000;
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..s {
                let x = p.sample_one(&mut rng);
                let f = -p.log_pdf(x);
                sum += f;
                sq += f * f;
            }
            let mean = sum / s as f64;
            let var = (sq / s as f64 - mean * mean).max(0.0);
            let se = (var / s as f64).sqrt();
            assert!(
                (mean - p.entropy()).abs() < 3.0 * se,
                "kappa={kappa}: mc={mean} analytic={} se={se}",
                p.entropy()
            );
        }
    }

    #[test]
    fn conjugate_prior_vanishes_in_zero_limit() {
        let prior = VmfParams::new(UnitVector3::X, 1e-15).unwrap();
        let post = conjugate_posterior(&prior, 2.0, &[UnitVector3::Z]).unwrap();
        assert!((post.mu().as_vec3() - UnitVector3::Z.as_vec3()).norm() < 1e-9);
        assert!((post.kappa() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn conjugate_hand_example() {
        let prior = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
        let post = conjugate_posterior(&prior, 1.0, &[UnitVector3::X]).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((post.mu().x() - inv_sqrt2).abs() < 1e-12);
        assert!((post.mu().z() - inv_sqrt2).abs() < 1e-12);
        assert!(post.mu().y().abs() < 1e-12);
        assert!((post.kappa() - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn conjugate_exact_cancellation_is_degenerate() {
        let prior = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
        let err = conjugate_posterior(&prior, 1.0, &[(-UnitVector3::Z)]);
        assert!(matches!(err, Err(Error::DegeneratePosterior(_))));
    }

    #[test]
    fn conjugate_permutation_invariant() {
        let mut rng = RandomStream::new(31);
        let prior = VmfParams::new(uniform_sphere(&mut rng), 0.7).unwrap();
        let data: Vec<_> = (0..20).map(|_| uniform_sphere(&mut rng)).collect();
        let mut reversed = data.clone();
        reversed.reverse();
        let a = conjugate_posterior(&prior, 2.5, &data).unwrap();
        let b = conjugate_posterior(&prior, 2.5, &reversed).unwrap();
        // sums are permutation-invariant up to float addition order
        assert!((a.kappa() - b.kappa()).abs() < 1e-12);
        assert!((a.mu().as_vec3() - b.mu().as_vec3()).norm() < 1e-12);
    }

    #[test]
    fn conjugate_rotation_equivariant() {
        let mut rng = RandomStream::new(33);
        for _ in 0..20 {
            let prior_mu = uniform_sphere(&mut rng);
            let prior = VmfParams::new(prior_mu, 1.3).unwrap();
            let data: Vec<_> = (0..5).map(|_| uniform_sphere(&mut rng)).collect();
            let rot = align_rotation(uniform_sphere(&mut rng), uniform_sphere(&mut rng));
            let post = conjugate_posterior(&prior, 2.0, &data).unwrap();

            let rot_prior = VmfParams::new(rot.apply_unit(prior_mu), 1.3).unwrap();
            let rot_data: Vec<_> = data.iter().map(|x| rot.apply_unit(*x)).collect();
            let rot_post = conjugate_posterior(&rot_prior, 2.0, &rot_data).unwrap();

            let expect = rot.apply_unit(post.mu());
            assert!((rot_post.mu().as_vec3() - expect.as_vec3()).norm() < 1e-9);
        }
    }

    #[test]
    fn map_single_datum_at_prior_mean() {
        let prior = VmfParams::new(UnitVector3::Y, 1.0).unwrap();
        let m = map_estimate(&prior, 3.0, &[UnitVector3::Y]).unwrap();
        assert!((m.as_vec3() - UnitVector3::Y.as_vec3()).norm() < 1e-12);
    }

    #[test]
    fn map_flips_to_data_side_with_larger_weight() {
        // brute-force maximization of kappa0 mu0.mu + kappa sum(x.mu) over a
        // spherical grid confirms the closed form
        let prior = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
        let data = [(-UnitVector3::Z)];
        let lik_kappa = 4.0;
        let map = map_estimate(&prior, lik_kappa, &data).unwrap();
        assert!((map.as_vec3() - (-UnitVector3::Z).as_vec3()).norm() < 1e-9);

        let mut best = (f64::NEG_INFINITY, UnitVector3::Z);
        let n = 100;
        for i in 0..n {
            for j in 0..(2 * n) {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                let phi = std::f64::consts::PI * j as f64 / n as f64;
                let mu = UnitVector3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                )
                .unwrap();
                let score = prior.kappa() * prior.mu().dot(mu)
                    + lik_kappa * data.iter().map(|x| x.dot(mu)).sum::<f64>();
                if score > best.0 {
                    best = (score, mu);
                }
            }
        }
        assert!(best.1.angle_to(map) < 0.05, "grid max disagrees with MAP");
    }

    #[test]
    fn map_recovers_truth_from_concentrated_data() {
        let mut rng = RandomStream::new(44);
        let truth = UnitVector3::new(0.6, -0.3, 0.74).unwrap();
        let gen = VmfParams::new(truth, 50.0).unwrap();
        let data = gen.sample(100, &mut rng);
        let prior = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
        let map = map_estimate(&prior, 50.0, &data).unwrap();
        assert!(map.angle_to(truth) < 5f64.to_radians());
    }
}
