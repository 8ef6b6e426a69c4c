//! Desk-scale synthetic benchmark: directional data with cluster-structured
//! features, a linear predictor trained under one of three baseline-vector
//! objectives, and uncertainty-calibration reports.
//!
//! Data model: each cluster has a feature-space center (standard normal in
//! R^d), a true mean direction on the sphere, and a true concentration.
//! Points carry `feature = center + sigma * noise` and a direction drawn from
//! the cluster's vMF. Out-of-distribution points are in-distribution features
//! translated by `ood_shift * sigma` along one random fixed feature axis.
//!
//! The predictor maps features linearly to a raw 3-vector (normalized into
//! the likelihood mean) and a scalar (softplus into the likelihood
//! concentration). The Bayesian objective additionally fits a feature-density
//! GMM on the training split, converts densities to evidence, and updates the
//! per-cluster informative prior; its reported baseline is the posterior mean.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmm::{fit_em, GmmModel};
use crate::losses::{cosine_loss, grad_bayesian_loss, nll_loss, BayesianLossConfig};
use crate::metrics::{ood_auroc, sparsification};
use crate::natpn::{
    evidence_from_log_density_capped, informative_prior, posterior_update, CertaintyBudget,
    Evidence,
};
use crate::rng::RandomStream;
use crate::special::a3;
use crate::sphere::{uniform_sphere, UnitVector3, Vec3};
use crate::vmf::VmfParams;

/// Synthetic dataset configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub cluster_count: usize,
    pub points_per_cluster: usize,
    /// True per-cluster concentrations, cycled if shorter than cluster_count.
    pub true_kappas: Vec<f64>,
    pub feature_dim: usize,
    pub feature_noise_sigma: f64,
    /// OOD translation in units of feature_noise_sigma.
    pub ood_shift: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            cluster_count: 4,
            points_per_cluster: 300,
            true_kappas: vec![50.0, 100.0, 200.0, 400.0],
            feature_dim: 8,
            feature_noise_sigma: 0.5,
            ood_shift: 10.0,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cluster_count == 0 {
            return Err(Error::Parse("cluster_count must be >= 1".into()));
        }
        if self.points_per_cluster < 5 {
            return Err(Error::Parse("points_per_cluster must be >= 5".into()));
        }
        if self.true_kappas.is_empty() {
            return Err(Error::Parse("true_kappas must be non-empty".into()));
        }
        if self.true_kappas.iter().any(|k| !k.is_finite() || *k <= 0.0) {
            return Err(Error::Parse("true_kappas must be positive".into()));
        }
        if self.feature_dim == 0 {
            return Err(Error::Parse("feature_dim must be >= 1".into()));
        }
        if !self.feature_noise_sigma.is_finite() || self.feature_noise_sigma < 0.0 {
            return Err(Error::Parse("feature_noise_sigma must be >= 0".into()));
        }
        if !self.ood_shift.is_finite() || self.ood_shift < 0.0 {
            return Err(Error::Parse("ood_shift must be >= 0".into()));
        }
        Ok(())
    }

    fn kappa_for(&self, cluster: usize) -> f64 {
        self.true_kappas[cluster % self.true_kappas.len()]
    }
}

/// One synthetic observation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataPoint {
    /// Observed unit direction (the grasp baseline in the robotics reading).
    #[serde(rename = "x")]
    pub direction: UnitVector3,
    pub feature: Vec<f64>,
    pub cluster: usize,
    pub ood: bool,
}

/// A generated or loaded dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: Vec<DataPoint>,
    /// True (or estimated, when loaded) per-cluster mean directions. The
    /// negated direction plays the surface normal, so these feed the
    /// informative priors directly.
    pub cluster_directions: Vec<UnitVector3>,
}

impl Dataset {
    pub fn cluster_count(&self) -> usize {
        self.cluster_directions.len()
    }

    /// One JSON object per line: {"x":[...], "feature":[...], "cluster":..,
    /// "ood":..}.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for p in &self.points {
            serde_json::to_writer(&mut w, p)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Load a JSONL dataset. Cluster mean directions are estimated from the
    /// per-cluster resultants of the in-distribution points.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut points = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            points.push(serde_json::from_str::<DataPoint>(&line)?);
        }
        if points.is_empty() {
            return Err(Error::EmptyInput("dataset"));
        }
        let dim = points[0].feature.len();
        let clusters = points.iter().map(|p| p.cluster).max().unwrap() + 1;
        let mut sums = vec![Vec3::ZERO; clusters];
        for p in &points {
            if p.feature.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.feature.len(),
                });
            }
            if !p.ood {
                sums[p.cluster] = sums[p.cluster] + p.direction.as_vec3();
            }
        }
        let cluster_directions = sums
            .into_iter()
            .map(|s| {
                s.normalized()
                    .map_err(|_| Error::EmptyInput("cluster without ID points"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            cluster_directions,
        })
    }
}

/// Generate a dataset: `points_per_cluster` ID points per cluster plus a
/// quarter as many OOD points per cluster (features shifted along the fixed
/// OOD axis; directions still follow the cluster's vMF).
pub fn gen_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let root = RandomStream::new(cfg.seed);

    // cluster geometry
    let mut setup = root.substream(0);
    let centers: Vec<Vec<f64>> = (0..cfg.cluster_count)
        .map(|_| (0..cfg.feature_dim).map(|_| setup.next_gaussian()).collect())
        .collect();
    let cluster_directions: Vec<UnitVector3> = (0..cfg.cluster_count)
        .map(|_| uniform_sphere(&mut setup))
        .collect();

    // fixed random OOD axis in feature space
    let mut axis_rng = root.substream(1);
    let ood_axis = {
        let raw: Vec<f64> = (0..cfg.feature_dim)
            .map(|_| axis_rng.next_gaussian())
            .collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        raw.into_iter().map(|v| v / norm).collect::<Vec<f64>>()
    };

    let mut points = Vec::new();
    let mut id_rng = root.substream(2);
    for c in 0..cfg.cluster_count {
        let vmf = VmfParams::new(cluster_directions[c], cfg.kappa_for(c))?;
        for _ in 0..cfg.points_per_cluster {
            let feature: Vec<f64> = centers[c]
                .iter()
                .map(|m| m + cfg.feature_noise_sigma * id_rng.next_gaussian())
                .collect();
            points.push(DataPoint {
                direction: vmf.sample_one(&mut id_rng),
                feature,
                cluster: c,
                ood: false,
            });
        }
    }
    let mut ood_rng = root.substream(3);
    let ood_per_cluster = cfg.points_per_cluster / 4;
    let shift = cfg.ood_shift * cfg.feature_noise_sigma;
    for c in 0..cfg.cluster_count {
        let vmf = VmfParams::new(cluster_directions[c], cfg.kappa_for(c))?;
        for _ in 0..ood_per_cluster {
            let feature: Vec<f64> = centers[c]
                .iter()
                .zip(&ood_axis)
                .map(|(m, a)| m + cfg.feature_noise_sigma * ood_rng.next_gaussian() + shift * a)
                .collect();
            points.push(DataPoint {
                direction: vmf.sample_one(&mut ood_rng),
                feature,
                cluster: c,
                ood: true,
            });
        }
    }

    Ok(Dataset {
        points,
        cluster_directions,
    })
}

/// Which baseline-vector objective trains the predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Cosine,
    Nll,
    Bayesian,
}

impl std::str::FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(LossKind::Cosine),
            "nll" => Ok(LossKind::Nll),
            "bayesian" => Ok(LossKind::Bayesian),
            other => Err(Error::Parse(format!("unknown loss kind: {other}"))),
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LossKind::Cosine => write!(f, "cosine"),
            LossKind::Nll => write!(f, "nll"),
            LossKind::Bayesian => write!(f, "bayesian"),
        }
    }
}

/// Optimizer and evidence-pipeline settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub step_size: f64,
    pub iterations: usize,
    /// Entropy discount of the Bayesian loss.
    pub gamma: f64,
    /// Certainty budget; defaults to the training-set size when None.
    pub n_h: Option<f64>,
    pub m_max: f64,
    pub gmm_k: usize,
    pub gmm_iters: usize,
    pub gmm_tol: f64,
    /// Scale log-densities by 1/feature_dim before converting to evidence
    /// (keeps budgets dimension-free). Raw densities by default.
    pub dim_normalized_density: bool,
    /// Fraction of each cluster's ID points used for training.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            step_size: 1e-2,
            iterations: 2000,
            gamma: 1e-3,
            n_h: None,
            m_max: crate::natpn::DEFAULT_EVIDENCE_CAP,
            gmm_k: 20,
            gmm_iters: 200,
            gmm_tol: 1e-7,
            dim_normalized_density: false,
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::Parse("step_size must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Parse("iterations must be >= 1".into()));
        }
        if self.gamma < 0.0 || !self.gamma.is_finite() {
            return Err(Error::Parse("gamma must be >= 0".into()));
        }
        if let Some(n_h) = self.n_h {
            if !(n_h > 0.0 && n_h.is_finite()) {
                return Err(Error::Parse("n_h must be positive".into()));
            }
        }
        if !(self.m_max.is_finite() && self.m_max > 0.0) {
            return Err(Error::Parse("m_max must be positive".into()));
        }
        if self.gmm_k == 0 {
            return Err(Error::Parse("gmm_k must be >= 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Parse("train_fraction must be in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Evaluation of one fitted predictor, Table-style.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub loss_kind: LossKind,
    /// Mean 1 - cosine error of the reported baseline (posterior mean under
    /// the Bayesian objective, likelihood mean otherwise) over the evaluation
    /// set: the held-out ID split plus every OOD point.
    pub cosine_error: f64,
    /// Sparsification of held-out errors ordered by aleatoric uncertainty
    /// 1/kappa_c. Absent under the cosine objective (no concentration head).
    pub ausc_aleatoric: Option<f64>,
    pub ause_aleatoric: Option<f64>,
    /// Sparsification ordered by epistemic uncertainty 1/kappa'_0. Only the
    /// Bayesian objective carries a posterior.
    pub ausc_epistemic: Option<f64>,
    pub ause_epistemic: Option<f64>,
    /// Mann-Whitney AUROC of evidence separating held-out ID from OOD.
    pub ood_auroc: Option<f64>,
    /// Held-out mean feature log-density under the evidence GMM (the density
    /// term slot of the total loss).
    pub heldout_mean_log_density: Option<f64>,
    pub loss_trace: Vec<f64>,
    pub train_points: usize,
    pub heldout_points: usize,
    pub ood_points: usize,
    /// Per-held-out-point arrays (same order). `heldout_errors` scores the
    /// reported baseline; `heldout_likelihood_errors` scores the raw
    /// likelihood mean and is what the sparsification metrics rank (the
    /// uncertainty heads speak about the likelihood prediction, not about the
    /// prior knowledge folded in by the posterior).
    pub heldout_errors: Vec<f64>,
    pub heldout_likelihood_errors: Vec<f64>,
    pub heldout_aleatoric: Option<Vec<f64>>,
    pub heldout_epistemic: Option<Vec<f64>>,
    pub heldout_kappa_lik: Option<Vec<f64>>,
    pub heldout_cluster: Vec<usize>,
    pub heldout_ood: Vec<bool>,
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

struct LinearPredictor {
    // rows of the 3 x d direction map plus bias
    w_mu: [Vec<f64>; 3],
    b_mu: [f64; 3],
    w_kappa: Vec<f64>,
    b_kappa: f64,
}

impl LinearPredictor {
    fn init(dim: usize, rng: &mut RandomStream) -> Self {
        let scale = 0.1 / (dim as f64).sqrt();
        let row = |rng: &mut RandomStream| -> Vec<f64> {
            (0..dim).map(|_| scale * rng.next_gaussian()).collect()
        };
        let w_mu = [row(rng), row(rng), row(rng)];
        let b_mu = [
            scale * rng.next_gaussian(),
            scale * rng.next_gaussian(),
            scale * rng.next_gaussian(),
        ];
        LinearPredictor {
            w_mu,
            b_mu,
            w_kappa: row(rng),
            // softplus(0.5413) ~ 1.0
            b_kappa: 0.5413,
        }
    }

    /// Raw direction vector and raw concentration input.
    fn forward(&self, z: &[f64]) -> (Vec3, f64) {
        let dotrow = |w: &[f64]| -> f64 { w.iter().zip(z).map(|(a, b)| a * b).sum() };
        let v = Vec3::new(
            dotrow(&self.w_mu[0]) + self.b_mu[0],
            dotrow(&self.w_mu[1]) + self.b_mu[1],
            dotrow(&self.w_mu[2]) + self.b_mu[2],
        );
        let s = dotrow(&self.w_kappa) + self.b_kappa;
        (v, s)
    }

    fn predict(&self, z: &[f64]) -> Result<(UnitVector3, f64)> {
        let (v, s) = self.forward(z);
        if v.norm() < 1e-12 {
            return Err(Error::ZeroNorm(v.norm()));
        }
        Ok((v.normalized()?, softplus(s)))
    }
}

struct GradAccum {
    w_mu: [Vec<f64>; 3],
    b_mu: [f64; 3],
    w_kappa: Vec<f64>,
    b_kappa: f64,
}

impl GradAccum {
    fn zeros(dim: usize) -> Self {
        GradAccum {
            w_mu: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]],
            b_mu: [0.0; 3],
            w_kappa: vec![0.0; dim],
            b_kappa: 0.0,
        }
    }

    fn add_point(&mut self, z: &[f64], d_v: Vec3, d_s: f64) {
        let dv = [d_v.x, d_v.y, d_v.z];
        for (r, &g) in dv.iter().enumerate() {
            for (w, zi) in self.w_mu[r].iter_mut().zip(z) {
                *w += g * zi;
            }
            self.b_mu[r] += g;
        }
        for (w, zi) in self.w_kappa.iter_mut().zip(z) {
            *w += d_s * zi;
        }
        self.b_kappa += d_s;
    }

    fn apply(&self, p: &mut LinearPredictor, step: f64, n: f64) {
        let lr = step / n;
        for r in 0..3 {
            for (w, g) in p.w_mu[r].iter_mut().zip(&self.w_mu[r]) {
                *w -= lr * g;
            }
            p.b_mu[r] -= lr * self.b_mu[r];
        }
        for (w, g) in p.w_kappa.iter_mut().zip(&self.w_kappa) {
            *w -= lr * g;
        }
        p.b_kappa -= lr * self.b_kappa;
    }
}

/// Bayesian-pipeline state shared by training and evaluation.
struct EvidencePipeline {
    gmm: GmmModel,
    budget: CertaintyBudget,
    m_max: f64,
    dim_normalized: bool,
    priors: Vec<VmfParams>,
}

impl EvidencePipeline {
    fn evidence(&self, feature: &[f64]) -> Result<Evidence> {
        let ld = if self.dim_normalized {
            self.gmm.dim_normalized_log_density(feature)?
        } else {
            self.gmm.log_density(feature)?
        };
        evidence_from_log_density_capped(ld, self.budget, self.m_max)
    }
}

/// Train a linear predictor on the dataset's training split under the chosen
/// objective and evaluate on the held-out split.
pub fn fit(dataset: &Dataset, kind: LossKind, opt: &OptConfig) -> Result<FitReport> {
    opt.validate()?;
    if dataset.points.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let dim = dataset.points[0].feature.len();

    // deterministic per-cluster split of the ID points
    let clusters = dataset.cluster_count();
    let mut train_idx = Vec::new();
    let mut held_idx = Vec::new();
    let mut ood_idx = Vec::new();
    for c in 0..clusters {
        let cluster_points: Vec<usize> = dataset
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.cluster == c && !p.ood)
            .map(|(i, _)| i)
            .collect();
        let n_train = ((cluster_points.len() as f64) * opt.train_fraction).floor() as usize;
        train_idx.extend_from_slice(&cluster_points[..n_train]);
        held_idx.extend_from_slice(&cluster_points[n_train..]);
    }
    for (i, p) in dataset.points.iter().enumerate() {
        if p.ood {
            ood_idx.push(i);
        }
    }
    if train_idx.is_empty() || held_idx.is_empty() {
        return Err(Error::InsufficientData {
            needed: 2,
            got: train_idx.len() + held_idx.len(),
        });
    }

    let rng = RandomStream::new(opt.seed);
    let mut init_rng = rng.substream(0);
    let mut predictor = LinearPredictor::init(dim, &mut init_rng);
    let cfg = BayesianLossConfig::new(opt.gamma)?;

    // evidence pipeline (Bayesian objective only)
    let pipeline = if kind == LossKind::Bayesian {
        let train_features: Vec<Vec<f64>> = train_idx
            .iter()
            .map(|&i| dataset.points[i].feature.clone())
            .collect();
        let k = opt.gmm_k.min(train_features.len());
        let mut gmm_rng = rng.substream(1);
        let em = fit_em(&train_features, k, opt.gmm_iters, opt.gmm_tol, &mut gmm_rng)?;
        let budget = CertaintyBudget::new(opt.n_h.unwrap_or(train_idx.len() as f64))?;
        // the negated cluster direction plays the surface normal at the
        // contact, so the informative prior mean is the cluster direction
        let priors = dataset
            .cluster_directions
            .iter()
            .map(|d| informative_prior(-*d))
            .collect();
        Some(EvidencePipeline {
            gmm: em.model,
            budget,
            m_max: opt.m_max,
            dim_normalized: opt.dim_normalized_density,
            priors,
        })
    } else {
        None
    };

    // evidence per training point (the density model is fixed while the
    // predictor trains)
    let train_evidence: Vec<Evidence> = match &pipeline {
        Some(pipe) => train_idx
            .iter()
            .map(|&i| pipe.evidence(&dataset.points[i].feature))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };

    let mut trace = Vec::with_capacity(opt.iterations);
    for iter in 0..opt.iterations {
        let mut grad = GradAccum::zeros(dim);
        let mut loss_sum = 0.0;
        for (ti, &i) in train_idx.iter().enumerate() {
            let p = &dataset.points[i];
            let (v, s) = predictor.forward(&p.feature);
            let norm = v.norm();
            if norm < 1e-12 {
                return Err(Error::Divergence { iteration: iter });
            }
            let mu = v.normalized()?;
            let target = p.direction;
            match kind {
                LossKind::Cosine => {
                    loss_sum += cosine_loss(mu, target);
                    // d/dv (1 - t . v/|v|) = -(I - mu mu^T) t / |v|
                    let tangent = target.as_vec3() - mu.scale(mu.dot(target));
                    grad.add_point(&p.feature, tangent.scale(-1.0 / norm), 0.0);
                }
                LossKind::Nll => {
                    let kappa = softplus(s);
                    let params = VmfParams::new(mu, kappa)?;
                    loss_sum += nll_loss(&params, target);
                    let tangent = target.as_vec3() - mu.scale(mu.dot(target));
                    let d_v = tangent.scale(-kappa / norm);
                    let d_s = (a3(kappa)? - mu.dot(target)) * sigmoid(s);
                    grad.add_point(&p.feature, d_v, d_s);
                }
                LossKind::Bayesian => {
                    let kappa = softplus(s);
                    let pipe = pipeline.as_ref().expect("pipeline built for bayesian");
                    let prior = &pipe.priors[p.cluster];
                    let g =
                        grad_bayesian_loss(prior, mu, train_evidence[ti], kappa, target, &cfg)?;
                    loss_sum += g.loss;
                    // chain through mu = v/|v| and kappa = softplus(s)
                    let d_v = g.d_observed_mu.scale(1.0 / norm);
                    let d_s = g.d_lik_kappa * sigmoid(s);
                    grad.add_point(&p.feature, d_v, d_s);
                }
            }
        }
        let mean_loss = loss_sum / train_idx.len() as f64;
        if !mean_loss.is_finite() {
            return Err(Error::Divergence { iteration: iter });
        }
        trace.push(mean_loss);
        grad.apply(&mut predictor, opt.step_size, train_idx.len() as f64);
    }

    // held-out evaluation over everything the predictor never trained on:
    // the held-out ID split plus all OOD points
    let eval_idx: Vec<usize> = held_idx.iter().chain(&ood_idx).copied().collect();
    let mut errors = Vec::with_capacity(eval_idx.len());
    let mut lik_errors = Vec::with_capacity(eval_idx.len());
    let mut aleatoric = Vec::with_capacity(eval_idx.len());
    let mut epistemic = Vec::with_capacity(eval_idx.len());
    let mut kappa_lik = Vec::with_capacity(eval_idx.len());
    let mut held_cluster = Vec::with_capacity(eval_idx.len());
    let mut held_ood = Vec::with_capacity(eval_idx.len());
    for &i in &eval_idx {
        let p = &dataset.points[i];
        let (mu, kappa) = predictor.predict(&p.feature)?;
        let reported = match &pipeline {
            Some(pipe) => {
                let ev = pipe.evidence(&p.feature)?;
                let up = posterior_update(&pipe.priors[p.cluster], mu, ev)?;
                epistemic.push(1.0 / up.posterior.kappa());
                up.posterior.mu()
            }
            None => mu,
        };
        errors.push(cosine_loss(reported, p.direction));
        lik_errors.push(cosine_loss(mu, p.direction));
        aleatoric.push(1.0 / kappa.max(1e-12));
        kappa_lik.push(kappa);
        held_cluster.push(p.cluster);
        held_ood.push(p.ood);
    }
    let cosine_error = errors.iter().sum::<f64>() / errors.len() as f64;

    let (ausc_al, ause_al) = match kind {
        LossKind::Cosine => (None, None),
        _ => {
            let (a, e) = sparsification(&lik_errors, &aleatoric)?;
            (Some(a), Some(e))
        }
    };
    let (ausc_ep, ause_ep, auroc, heldout_mld) = match &pipeline {
        Some(pipe) => {
            let (a, e) = sparsification(&lik_errors, &epistemic)?;
            // evidence separation over the same evaluation set
            let mut ev = Vec::new();
            let mut flags = Vec::new();
            for &i in &eval_idx {
                let point = &dataset.points[i];
                ev.push(pipe.evidence(&point.feature)?.m());
                flags.push(point.ood);
            }
            let auroc = if ood_idx.is_empty() {
                None
            } else {
                Some(ood_auroc(&ev, &flags)?)
            };
            let held_features: Vec<Vec<f64>> = held_idx
                .iter()
                .map(|&i| dataset.points[i].feature.clone())
                .collect();
            let mld = pipe.gmm.mean_log_density(&held_features)?;
            (Some(a), Some(e), auroc, Some(mld))
        }
        None => (None, None, None, None),
    };

    Ok(FitReport {
        loss_kind: kind,
        cosine_error,
        ausc_aleatoric: ausc_al,
        ause_aleatoric: ause_al,
        ausc_epistemic: ausc_ep,
        ause_epistemic: ause_ep,
        ood_auroc: auroc,
        heldout_mean_log_density: heldout_mld,
        loss_trace: trace,
        train_points: train_idx.len(),
        heldout_points: held_idx.len(),
        ood_points: ood_idx.len(),
        heldout_errors: errors,
        heldout_likelihood_errors: lik_errors,
        heldout_aleatoric: match kind {
            LossKind::Cosine => None,
            _ => Some(aleatoric),
        },
        heldout_epistemic: match kind {
            LossKind::Bayesian => Some(epistemic),
            _ => None,
        },
        heldout_kappa_lik: match kind {
            LossKind::Cosine => None,
            _ => Some(kappa_lik),
        },
        heldout_cluster: held_cluster,
        heldout_ood: held_ood,
    })
}


#[cfg(test)]
mod config_validation_tests {
    use super::*;

    #[test]
    fn synth_config_rejects_bad_values() {
        let ok = SynthConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SynthConfig { cluster_count: 0, ..ok.clone() }.validate().is_err());
        assert!(SynthConfig { points_per_cluster: 2, ..ok.clone() }.validate().is_err());
        assert!(SynthConfig { true_kappas: vec![], ..ok.clone() }.validate().is_err());
        assert!(SynthConfig { true_kappas: vec![-1.0], ..ok.clone() }.validate().is_err());
        assert!(SynthConfig { feature_noise_sigma: -0.1, ..ok.clone() }.validate().is_err());
        assert!(SynthConfig { ood_shift: f64::NAN, ..ok }.validate().is_err());
    }

    #[test]
    fn opt_config_rejects_bad_values() {
        let ok = OptConfig::default();
        assert!(ok.validate().is_ok());
        assert!(OptConfig { step_size: 0.0, ..ok.clone() }.validate().is_err());
        assert!(OptConfig { iterations: 0, ..ok.clone() }.validate().is_err());
        assert!(OptConfig { gamma: -1.0, ..ok.clone() }.validate().is_err());
        assert!(OptConfig { n_h: Some(0.0), ..ok.clone() }.validate().is_err());
        assert!(OptConfig { train_fraction: 1.0, ..ok }.validate().is_err());
    }
}
