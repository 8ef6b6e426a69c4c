//! Optimization objectives: the analytical Bayesian loss (expected
//! log-likelihood plus discounted posterior entropy), first-order baselines
//! (cosine, NLL), grasp-component losses (soft approach bins, width, BCE,
//! extended Chamfer), and the weighted total.
//!
//! The expected log-likelihood of a vMF likelihood under a vMF posterior over
//! its mean has the closed form
//!
//! ```text
//! E[log vMF(x; mu, kappa)] = log Z(kappa) + (coth k' - 1/k') kappa x^T mu'
//! ```
//!
//! where (mu', k') are the posterior parameters. The coefficient is
//! [`crate::special::a3`]; it vanishes at k' = 0 (uniform posterior averages
//! the linear term to zero) and tends to 1 as k' grows (delta posterior,
//! plain log-likelihood).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natpn::{posterior_update, Evidence};
use crate::special::{a3, a3_prime, entropy_prime, log_norm_const};
use crate::sphere::{UnitVector3, Vec3};
use crate::vmf::VmfParams;

/// Entropy discount for the Bayesian loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesianLossConfig {
    gamma: f64,
}

impl BayesianLossConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::NonFinite("gamma"));
        }
        if gamma < 0.0 {
            return Err(Error::NegativeConcentration(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for BayesianLossConfig {
    /// A small entropy discount keeps the regularizer subdominant to the
    /// expected log-likelihood at typical concentration scales.
    fn default() -> Self {
        Self { gamma: 1e-3 }
    }
}

/// Per-term weights of the total loss, in the order
/// (width, quality, baseline, approach, density, reconstruction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_w: f64,
    pub lambda_c: f64,
    pub lambda_b: f64,
    pub lambda_a: f64,
    pub lambda_z: f64,
    pub lambda_rec: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_w: 10.0,
            lambda_c: 0.1,
            lambda_b: 0.1,
            lambda_a: 0.1,
            lambda_z: 0.0001,
            lambda_rec: 10.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_w", self.lambda_w),
            ("lambda_c", self.lambda_c),
            ("lambda_b", self.lambda_b),
            ("lambda_a", self.lambda_a),
            ("lambda_z", self.lambda_z),
            ("lambda_rec", self.lambda_rec),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite("loss weight"));
            }
            if v < 0.0 {
                return Err(Error::Parse(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Per-sample loss terms entering the weighted total.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct LossParts {
    pub width: f64,
    pub quality: f64,
    pub baseline: f64,
    pub approach: f64,
    pub density: f64,
    pub recon: f64,
}

/// Closed-form expected log-likelihood of `vMF(target; ., lik_kappa)` under
/// the posterior `post` over the likelihood mean.
pub fn expected_log_likelihood(post: &VmfParams, lik_kappa: f64, target: UnitVector3) -> Result<f64> {
    let logz = log_norm_const(lik_kappa)?;
    let coeff = a3(post.kappa())?;
    Ok(logz + coeff * lik_kappa * target.dot(post.mu()))
}

/// Bayesian loss: negative expected log-likelihood minus `gamma` times the
/// posterior entropy.
pub fn bayesian_loss(
    post: &VmfParams,
    lik_kappa: f64,
    target: UnitVector3,
    cfg: &BayesianLossConfig,
) -> Result<f64> {
    Ok(-expected_log_likelihood(post, lik_kappa, target)? - cfg.gamma() * post.entropy())
}

/// 1 - pred^T target, in [0, 2].
pub fn cosine_loss(pred_mu: UnitVector3, target: UnitVector3) -> f64 {
    1.0 - pred_mu.dot(target)
}

/// Negative vMF log-likelihood of `target` under `pred`.
pub fn nll_loss(pred: &VmfParams, target: UnitVector3) -> f64 {
    -pred.log_pdf(target)
}

/// Partial derivatives of the Bayesian loss with respect to the observed
/// likelihood mean (tangent-space 3-vector), the likelihood concentration,
/// and the evidence pseudo-count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesianLossGrad {
    pub loss: f64,
    /// Gradient with respect to the observed mean, projected orthogonal to it.
    pub d_observed_mu: Vec3,
    pub d_lik_kappa: f64,
    pub d_evidence: f64,
}

/// Analytic gradient of [`bayesian_loss`] where the posterior is expressed
/// through `(prior, observed_mu, ev)` via [`posterior_update`].
pub fn grad_bayesian_loss(
    prior: &VmfParams,
    observed_mu: UnitVector3,
    ev: Evidence,
    lik_kappa: f64,
    target: UnitVector3,
    cfg: &BayesianLossConfig,
) -> Result<BayesianLossGrad> {
    let up = posterior_update(prior, observed_mu, ev)?;
    let post = up.posterior;
    let kappa_post = post.kappa();
    let mu_post = post.mu();
    // natural-parameter norm ||kappa0 mu0 + m mu_c||
    let theta_norm = up.interp_norm * kappa_post;

    let dot = target.dot(mu_post);
    let coeff = a3(kappa_post)?;
    let loss = -expected_log_likelihood(&post, lik_kappa, target)? - cfg.gamma() * post.entropy();

    // dL/d kappa = a3(kappa) - a3(kappa') dot     (entropy is kappa-free)
    let d_lik_kappa = a3(lik_kappa)? - coeff * dot;

    // d mu'/d theta = (I - mu' mu'^T) / ||theta||
    let tangent_target = target.as_vec3() - mu_post.scale(dot);
    // dL/dm = -[a3'(k') kappa dot + a3(k') kappa target^T (I - mu'mu'^T) mu_c / ||theta||]
    //         - gamma H'(k')
    let d_dot_dm = tangent_target.dot(observed_mu.as_vec3()) / theta_norm;
    let d_evidence = -(a3_prime(kappa_post)? * lik_kappa * dot + coeff * lik_kappa * d_dot_dm)
        - cfg.gamma() * entropy_prime(kappa_post)?;

    // dL/d mu_c (free) = -a3(k') kappa (m / ||theta||) (I - mu'mu'^T) target,
    // then projected to the tangent space of mu_c.
    let free = tangent_target.scale(-coeff * lik_kappa * ev.m() / theta_norm);
    let d_observed_mu = free - observed_mu.scale(free.dot(observed_mu.as_vec3()));

    Ok(BayesianLossGrad {
        loss,
        d_observed_mu,
        d_lik_kappa,
        d_evidence,
    })
}

/// Sum of squared residuals between predicted bin scores and the cosine
/// targets `target^T bin_t`.
pub fn soft_bin_loss(
    scores: &[f64],
    target_approach: UnitVector3,
    bins: &[UnitVector3],
) -> Result<f64> {
    if scores.len() != bins.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: bins.len(),
        });
    }
    Ok(scores
        .iter()
        .zip(bins)
        .map(|(s, b)| {
            let r = s - target_approach.dot(*b);
            r * r
        })
        .sum())
}

/// Absolute width regression error; widths are physical and must be >= 0.
pub fn l1_width_loss(pred_w: f64, true_w: f64) -> Result<f64> {
    if pred_w < 0.0 {
        return Err(Error::NegativeWidth(pred_w));
    }
    if true_w < 0.0 {
        return Err(Error::NegativeWidth(true_w));
    }
    Ok((pred_w - true_w).abs())
}

/// Binary cross-entropy with the probability clamped to [1e-7, 1 - 1e-7].
pub fn bce_loss(pred_p: f64, label: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&pred_p) {
        return Err(Error::ProbabilityOutOfRange(pred_p));
    }
    let p = pred_p.clamp(1e-7, 1.0 - 1e-7);
    Ok(if label { -p.ln() } else { -(1.0 - p).ln() })
}

/// Extended Chamfer distance: symmetric sum (not mean) of squared
/// nearest-neighbor distances between two point sets.
pub fn chamfer_extended(p_set: &[Vec3], q_set: &[Vec3]) -> Result<f64> {
    if p_set.is_empty() || q_set.is_empty() {
        return Err(Error::EmptyInput("chamfer point set"));
    }
    let nearest_sq = |from: &[Vec3], to: &[Vec3]| -> f64 {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| {
                        let d = *p - *q;
                        d.dot(d)
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    };
    Ok(nearest_sq(p_set, q_set) + nearest_sq(q_set, p_set))
}

/// Weighted mean over samples: `(1/N) sum_i sum_terms lambda * part`.
pub fn total_loss(parts: &[LossParts], w: &LossWeights) -> f64 {
    if parts.is_empty() {
        return 0.0;
    }
    let sum: f64 = parts
        .iter()
        .map(|p| {
            w.lambda_w * p.width
                + w.lambda_c * p.quality
                + w.lambda_b * p.baseline
                + w.lambda_a * p.approach
                + w.lambda_z * p.density
                + w.lambda_rec * p.recon
        })
        .sum();
    sum / parts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::special::LN_4PI;
    use crate::sphere::uniform_sphere;

    // frozen from a 50-digit offline evaluation:
    // log Z(5) + a3(2) * 5 * 0.8
    const ELL_2_5_08: f64 = -3.0791348701046822;

    fn unit(x: f64, y: f64, z: f64) -> UnitVector3 {
        UnitVector3::new(x, y, z).unwrap()
    }

    #[test]
    fn ell_uniform_posterior_drops_linear_term() {
        let post = VmfParams::uniform();
        let v = expected_log_likelihood(&post, 5.0, unit(0.0, 0.6, 0.8)).unwrap();
        assert_eq!(v, log_norm_const(5.0).unwrap());
    }

    #[test]
    fn ell_reference_value() {
        let post = VmfParams::new(UnitVector3::Z, 2.0).unwrap();
        let target = unit(0.6, 0.0, 0.8); // dot = 0.8
        let v = expected_log_likelihood(&post, 5.0, target).unwrap();
        assert!((v - ELL_2_5_08).abs() < 1e-13, "{v}");
    }

    #[test]
    fn ell_matches_mc_at_reference_point() {
        // (1/S) sum log vMF(target; mu_s, 5) over mu_s ~ vMF(mu', 2)
        let post = VmfParams::new(UnitVector3::Z, 2.0).unwrap();
        let target = unit(0.6, 0.0, 0.8);
        let mut rng = RandomStream::new(5);
        let s = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        let lik_mu_free = |mu: UnitVector3| {
            VmfParams::new(mu, 5.0).unwrap().log_pdf(target)
        };
        for _ in 0..s {
            let f = lik_mu_free(post.sample_one(&mut rng));
            sum += f;
            sq += f * f;
        }
        let mean = sum / s as f64;
        let var = (sq / s as f64 - mean * mean).max(0.0);
        let se = (var / s as f64).sqrt();
        assert!(
            (mean - ELL_2_5_08).abs() < 3.0 * se,
            "mc={mean} analytic={ELL_2_5_08} se={se}"
        );
    }

    #[test]
    fn ell_limits() {
        for kappa in [0.5, 5.0] {
            for dot in [-1.0, 0.8] {
                let target = unit((1.0f64 - dot * dot).max(0.0).sqrt(), 0.0, dot);
                let logz = log_norm_const(kappa).unwrap();
                // small-concentration limit
                let post = VmfParams::new(UnitVector3::Z, 1e-9).unwrap();
                let v = expected_log_likelihood(&post, kappa, target).unwrap();
                assert!((v - logz).abs() < 1e-8, "low limit kappa={kappa} dot={dot}");
                // delta-posterior limit
                let post = VmfParams::new(UnitVector3::Z, 1e6).unwrap();
                let v = expected_log_likelihood(&post, kappa, target).unwrap();
                let expect = logz + kappa * dot;
                assert!(
                    (v - expect).abs() < 1e-5 * (1.0 + (kappa * dot).abs()),
                    "high limit kappa={kappa} dot={dot}"
                );
            }
        }
    }

    #[test]
    fn ell_monotone_in_dot() {
        let post = VmfParams::new(UnitVector3::Z, 3.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for dot in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let target = unit((1.0f64 - dot * dot).max(0.0).sqrt(), 0.0, dot);
            let v = expected_log_likelihood(&post, 2.0, target).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn bayesian_loss_composition() {
        let post = VmfParams::new(UnitVector3::Z, 2.0).unwrap();
        let target = unit(0.6, 0.0, 0.8);
        let zero_gamma = BayesianLossConfig::new(0.0).unwrap();
        let l = bayesian_loss(&post, 5.0, target, &zero_gamma).unwrap();
        assert!((l + ELL_2_5_08).abs() < 1e-13);

        // gamma = 1, uniform-posterior limit: -log Z(kappa) - log 4 pi
        let gamma_one = BayesianLossConfig::new(1.0).unwrap();
        let post0 = VmfParams::new(UnitVector3::Z, 1e-12).unwrap();
        let l = bayesian_loss(&post0, 5.0, target, &gamma_one).unwrap();
        let expect = -log_norm_const(5.0).unwrap() - LN_4PI;
        assert!((l - expect).abs() < 1e-8, "{l} vs {expect}");
    }

    #[test]
    fn cosine_loss_range() {
        let t = unit(0.0, 0.0, 1.0);
        assert_eq!(cosine_loss(t, t), 0.0);
        assert_eq!(cosine_loss(-t, t), 2.0);
        assert_eq!(cosine_loss(UnitVector3::X, t), 1.0);
    }

    #[test]
    fn nll_loss_cases() {
        assert!((nll_loss(&VmfParams::uniform(), UnitVector3::Z) - LN_4PI).abs() < 1e-15);
        let p = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
        assert!((nll_loss(&p, UnitVector3::Z) - 1.6924636085404864).abs() < 1e-13);
        // minimized over mu at mu = target
        let off = VmfParams::new(unit(0.1, 0.0, 1.0), 1.0).unwrap();
        assert!(nll_loss(&p, UnitVector3::Z) < nll_loss(&off, UnitVector3::Z));
    }

    /// Central finite differences of the Bayesian loss through
    /// `posterior_update`, used as the gradient oracle.
    fn fd_grads(
        prior: &VmfParams,
        observed: UnitVector3,
        m: f64,
        lik_kappa: f64,
        target: UnitVector3,
        cfg: &BayesianLossConfig,
        h: f64,
    ) -> (Vec3, f64, f64) {
        let loss_at = |obs: UnitVector3, m: f64, lk: f64| -> f64 {
            let up = posterior_update(prior, obs, Evidence::new(m).unwrap()).unwrap();
            bayesian_loss(&up.posterior, lk, target, cfg).unwrap()
        };
        // tangent directional derivatives via retraction normalize(mu + h e)
        let (e1, e2) = observed.orthonormal_basis();
        let dir = |e: UnitVector3| -> f64 {
            let plus = (observed.as_vec3() + e.scale(h)).normalized().unwrap();
            let minus = (observed.as_vec3() - e.scale(h)).normalized().unwrap();
            (loss_at(plus, m, lik_kappa) - loss_at(minus, m, lik_kappa)) / (2.0 * h)
        };
        let g_mu = e1.scale(dir(e1)) + e2.scale(dir(e2));
        let g_k = (loss_at(observed, m, lik_kappa + h) - loss_at(observed, m, lik_kappa - h))
            / (2.0 * h);
        let g_m = (loss_at(observed, m + h, lik_kappa) - loss_at(observed, m - h, lik_kappa))
            / (2.0 * h);
        (g_mu, g_k, g_m)
    }

    #[test]
    fn grad_matches_finite_differences() {
        let mut rng = RandomStream::new(71);
        let h = 1e-5;
        for i in 0..100 {
            let prior_mu = uniform_sphere(&mut rng);
            let observed = uniform_sphere(&mut rng);
            let target = uniform_sphere(&mut rng);
            // kappa' = kappa0 + m spanning [0.01, 100]
            let kappa0 = 10f64.powf(rng.next_range(-2.3, 1.6)).min(50.0);
            let m = 10f64.powf(rng.next_range(-2.3, 1.6)).min(50.0);
            let lik_kappa = 10f64.powf(rng.next_range(-1.0, 1.3));
            let gamma = [0.0, 1e-3, 1.0][i % 3];
            let cfg = BayesianLossConfig::new(gamma).unwrap();
            let prior = VmfParams::new(prior_mu, kappa0).unwrap();
            let ev = Evidence::new(m).unwrap();

            let g = grad_bayesian_loss(&prior, observed, ev, lik_kappa, target, &cfg).unwrap();
            let (fd_mu, fd_k, fd_m) = fd_grads(&prior, observed, m, lik_kappa, target, &cfg, h);

            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-6);
            assert!(
                rel(g.d_lik_kappa, fd_k) < 1e-5,
                "case {i}: d_kappa {} vs fd {}",
                g.d_lik_kappa,
                fd_k
            );
            assert!(
                rel(g.d_evidence, fd_m) < 1e-5,
                "case {i}: d_m {} vs fd {}",
                g.d_evidence,
                fd_m
            );
            let diff = (g.d_observed_mu - fd_mu).norm();
            let scale = g.d_observed_mu.norm().max(fd_mu.norm()).max(1e-6);
            assert!(
                diff / scale < 1e-5,
                "case {i}: d_mu {:?} vs fd {:?}",
                g.d_observed_mu,
                fd_mu
            );
        }
    }

    #[test]
    fn grad_zero_at_symmetric_stationary_point() {
        let mu = unit(0.3, -0.5, 0.81);
        let prior = VmfParams::new(mu, 2.0).unwrap();
        let cfg = BayesianLossConfig::default();
        let g = grad_bayesian_loss(&prior, mu, Evidence::new(1.5).unwrap(), 3.0, mu, &cfg).unwrap();
        assert!(g.d_observed_mu.norm() < 1e-12);
    }

    #[test]
    fn more_evidence_lowers_loss_on_aligned_data() {
        // gamma = 0, target aligned with everything: dL/dm < 0
        let mu = unit(0.0, 0.6, 0.8);
        let prior = VmfParams::new(mu, 1.0).unwrap();
        let cfg = BayesianLossConfig::new(0.0).unwrap();
        for m in [0.1, 1.0, 10.0] {
            let g =
                grad_bayesian_loss(&prior, mu, Evidence::new(m).unwrap(), 5.0, mu, &cfg).unwrap();
            assert!(g.d_evidence < 0.0, "m={m}: dL/dm = {}", g.d_evidence);
        }
    }

    #[test]
    fn soft_bin_loss_cases() {
        let baseline = UnitVector3::X;
        let bins = crate::grasp::bin_directions(baseline, 4).unwrap();
        let approach = bins[1];
        let targets: Vec<f64> = bins.iter().map(|b| approach.dot(*b)).collect();
        assert_eq!(soft_bin_loss(&targets, approach, &bins).unwrap(), 0.0);

        let shifted: Vec<f64> = targets.iter().map(|t| t + 0.1).collect();
        let v = soft_bin_loss(&shifted, approach, &bins).unwrap();
        assert!((v - 0.01 * bins.len() as f64).abs() < 1e-12);

        assert!(soft_bin_loss(&targets[..2], approach, &bins).is_err());

        // random case equals an independent recomputation
        let mut rng = RandomStream::new(3);
        let scores: Vec<f64> = (0..4).map(|_| rng.next_range(-1.0, 1.0)).collect();
        let a = uniform_sphere(&mut rng);
        let manual: f64 = (0..4)
            .map(|t| {
                let r = scores[t] - (a.x() * bins[t].x() + a.y() * bins[t].y() + a.z() * bins[t].z());
                r * r
            })
            .sum();
        assert!((soft_bin_loss(&scores, a, &bins).unwrap() - manual).abs() < 1e-15);
    }

    #[test]
    fn l1_width_cases() {
        assert_eq!(l1_width_loss(0.04, 0.04).unwrap(), 0.0);
        assert!((l1_width_loss(0.02, 0.05).unwrap() - 0.03).abs() < 1e-15);
        assert_eq!(
            l1_width_loss(0.02, 0.05).unwrap(),
            l1_width_loss(0.05, 0.02).unwrap()
        );
        assert!(l1_width_loss(-0.01, 0.05).is_err());
    }

    #[test]
    fn bce_cases() {
        assert!(bce_loss(1.0, true).unwrap() < 2e-7);
        assert!((bce_loss(0.5, true).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((bce_loss(0.5, false).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(bce_loss(1.2, true).is_err());
        assert!(bce_loss(-0.1, false).is_err());
    }

    #[test]
    fn chamfer_cases() {
        let p = vec![Vec3::new(0.0, 0.0, 0.0)];
        let q = vec![Vec3::new(1.0, 0.0, 0.0)];
        assert_eq!(chamfer_extended(&p, &p).unwrap(), 0.0);
        assert_eq!(chamfer_extended(&p, &q).unwrap(), 2.0);
        assert!(chamfer_extended(&p, &[]).is_err());
    }

    #[test]
    fn chamfer_equals_brute_force() {
        let mut rng = RandomStream::new(19);
        for _ in 0..100 {
            let p: Vec<Vec3> = (0..50)
                .map(|_| {
                    Vec3::new(
                        rng.next_range(-1.0, 1.0),
                        rng.next_range(-1.0, 1.0),
                        rng.next_range(-1.0, 1.0),
                    )
                })
                .collect();
            let q: Vec<Vec3> = (0..50)
                .map(|_| {
                    Vec3::new(
                        rng.next_range(-1.0, 1.0),
                        rng.next_range(-1.0, 1.0),
                        rng.next_range(-1.0, 1.0),
                    )
                })
                .collect();
            // independent double loop, accumulated per direction as two sums
            let mut fwd = 0.0;
            for a in &p {
                let mut best = f64::INFINITY;
                for b in &q {
                    let d = (a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2);
                    if d < best {
                        best = d;
                    }
                }
                fwd += best;
            }
            let mut bwd = 0.0;
            for b in &q {
                let mut best = f64::INFINITY;
                for a in &p {
                    let d = (a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2);
                    if d < best {
                        best = d;
                    }
                }
                bwd += best;
            }
            assert_eq!(chamfer_extended(&p, &q).unwrap(), fwd + bwd);
        }
    }

    #[test]
    fn total_loss_cases() {
        let w = LossWeights::default();
        assert_eq!(total_loss(&[LossParts::default()], &w), 0.0);
        let unit_parts = LossParts {
            width: 1.0,
            quality: 1.0,
            baseline: 1.0,
            approach: 1.0,
            density: 1.0,
            recon: 1.0,
        };
        let v = total_loss(&[unit_parts], &w);
        assert!((v - 20.3001).abs() < 1e-12);
        // linearity in each part
        let double = LossParts {
            baseline: 2.0,
            ..Default::default()
        };
        let single = LossParts {
            baseline: 1.0,
            ..Default::default()
        };
        assert!((total_loss(&[double], &w) - 2.0 * total_loss(&[single], &w)).abs() < 1e-15);
        // mean over samples
        let v2 = total_loss(&[unit_parts, LossParts::default()], &w);
        assert!((v2 - v / 2.0).abs() < 1e-12);
    }
}
