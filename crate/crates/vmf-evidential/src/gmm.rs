//! Diagonal-covariance Gaussian mixture fit by expectation-maximization.
//!
//! Provides the feature-space density `p(z)` that evidence is scaled from.
//! Initialization is k-means++ from the provided [`RandomStream`], so fits are
//! deterministic. Components that lose all responsibility mass are re-seeded
//! from the worst-fit datum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Feature vector in R^d.
pub type FeatureVector = Vec<f64>;

/// Lower bound on per-dimension variances (prevents singular collapse).
pub const VARIANCE_FLOOR: f64 = 1e-6;

const LN_2PI: f64 = 1.8378770664093453;

/// A fitted mixture: weights on the k-simplex, k x d means and per-dimension
/// variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct GmmModelJson {
    k: usize,
    dim: usize,
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl Serialize for GmmModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GmmModelJson {
            k: self.k(),
            dim: self.dim(),
            weights: self.weights.clone(),
            means: self.means.clone(),
            variances: self.variances.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GmmModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GmmModelJson::deserialize(d)?;
        let model = GmmModel {
            weights: raw.weights,
            means: raw.means,
            variances: raw.variances,
        };
        model
            .validate(raw.k, raw.dim)
            .map_err(serde::de::Error::custom)?;
        Ok(model)
    }
}

impl GmmModel {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, variances: Vec<Vec<f64>>) -> Result<Self> {
        let model = GmmModel {
            weights,
            means,
            variances,
        };
        let k = model.k();
        let dim = model.dim();
        model.validate(k, dim)?;
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn variances(&self) -> &[Vec<f64>] {
        &self.variances
    }

    fn validate(&self, k: usize, dim: usize) -> Result<()> {
        if self.weights.len() != k || self.means.len() != k || self.variances.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: self.means.len(),
            });
        }
        if k == 0 {
            return Err(Error::EmptyInput("gmm components"));
        }
        let wsum: f64 = self.weights.iter().sum();
        if (wsum - 1.0).abs() > 1e-9 {
            return Err(Error::Parse(format!("gmm weights sum to {wsum}, not 1")));
        }
        for (m, v) in self.means.iter().zip(&self.variances) {
            if m.len() != dim || v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.len(),
                });
            }
            if v.iter().any(|&x| x < VARIANCE_FLOOR * (1.0 - 1e-12)) {
                return Err(Error::Parse("gmm variance below floor".into()));
            }
            if m.iter().chain(v).any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("gmm parameter"));
            }
        }
        Ok(())
    }

    fn component_log_pdf(&self, j: usize, z: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((x, m), v) in z.iter().zip(&self.means[j]).zip(&self.variances[j]) {
            let d = x - m;
            acc += -0.5 * (LN_2PI + v.ln()) - d * d / (2.0 * v);
        }
        acc
    }

    /// log p(z) = logsumexp_j [ log w_j + log N(z; mean_j, diag var_j) ].
    pub fn log_density(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        let mut terms = Vec::with_capacity(self.k());
        for j in 0..self.k() {
            if self.weights[j] > 0.0 {
                terms.push(self.weights[j].ln() + self.component_log_pdf(j, z));
            }
        }
        Ok(log_sum_exp(&terms))
    }

    /// log p(z) scaled by 1/d: the per-dimension (geometric-mean) log-density.
    ///
    /// Useful when evidence budgets should not scale with the feature
    /// dimension; the raw density is the default everywhere.
    pub fn dim_normalized_log_density(&self, z: &[f64]) -> Result<f64> {
        Ok(self.log_density(z)? / self.dim() as f64)
    }

    /// Mean log-density over a batch (held-out likelihood reporting).
    pub fn mean_log_density(&self, data: &[FeatureVector]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyInput("gmm evaluation data"));
        }
        let mut acc = 0.0;
        for z in data {
            acc += self.log_density(z)?;
        }
        Ok(acc / data.len() as f64)
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Result of an EM fit: the model plus its training log-likelihood trace.
#[derive(Debug, Clone)]
pub struct EmFit {
    pub model: GmmModel,
    /// Mean log-likelihood after each iteration; non-decreasing up to the
    /// re-seeding of degenerate components.
    pub log_likelihood_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Fit a k-component diagonal GMM by EM with k-means++ seeding.
///
/// Stops when the mean log-likelihood improves by less than `tol`, or after
/// `max_iters`.
pub fn fit_em(
    data: &[FeatureVector],
    k: usize,
    max_iters: usize,
    tol: f64,
    rng: &mut RandomStream,
) -> Result<EmFit> {
    if k == 0 {
        return Err(Error::EmptyInput("gmm components"));
    }
    if data.len() < k {
        return Err(Error::InsufficientData {
            needed: k,
            got: data.len(),
        });
    }
    let dim = data[0].len();
    if dim == 0 {
        return Err(Error::EmptyInput("feature dimension"));
    }
    for z in data {
        if z.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: z.len(),
            });
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature"));
        }
    }
    let n = data.len();

    // global variance sets the initial spread and the re-seed scale
    let mut global_mean = vec![0.0; dim];
    for z in data {
        for (g, x) in global_mean.iter_mut().zip(z) {
            *g += x / n as f64;
        }
    }
    let mut global_var = vec![0.0; dim];
    for z in data {
        for ((g, x), m) in global_var.iter_mut().zip(z).zip(&global_mean) {
            *g += (x - m) * (x - m) / n as f64;
        }
    }
    for g in &mut global_var {
        *g = g.max(VARIANCE_FLOOR);
    }

    let means = kmeans_pp_seeds(data, k, rng);
    let mut model = GmmModel {
        weights: vec![1.0 / k as f64; k],
        means,
        variances: vec![global_var.clone(); k],
    };

    let mut trace = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    let mut resp = vec![vec![0.0f64; k]; n];
    for _ in 0..max_iters {
        iterations += 1;

        // E-step
        let mut ll = 0.0;
        for (i, z) in data.iter().enumerate() {
            let terms: Vec<f64> = (0..k)
                .map(|j| {
                    if model.weights[j] > 0.0 {
                        model.weights[j].ln() + model.component_log_pdf(j, z)
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let lse = log_sum_exp(&terms);
            ll += lse;
            for j in 0..k {
                resp[i][j] = (terms[j] - lse).exp();
            }
        }
        ll /= n as f64;
        trace.push(ll);

        // M-step
        let mut reseeded = false;
        for j in 0..k {
            let mass: f64 = resp.iter().map(|r| r[j]).sum();
            if mass < 1e-10 {
                // degenerate component: re-seed from the worst-fit datum
                let worst = data
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| {
                        let la = model.log_density(a).unwrap_or(f64::NEG_INFINITY);
                        let lb = model.log_density(b).unwrap_or(f64::NEG_INFINITY);
                        la.total_cmp(&lb)
                    })
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                log::warn!("gmm: component {j} lost all mass; re-seeding from datum {worst}");
                model.means[j] = data[worst].clone();
                model.variances[j] = global_var.clone();
                model.weights[j] = 1.0 / n as f64;
                reseeded = true;
                continue;
            }
            model.weights[j] = mass / n as f64;
            for d in 0..dim {
                let mut mean = 0.0;
                for (i, z) in data.iter().enumerate() {
                    mean += resp[i][j] * z[d];
                }
                mean /= mass;
                let mut var = 0.0;
                for (i, z) in data.iter().enumerate() {
                    let diff = z[d] - mean;
                    var += resp[i][j] * diff * diff;
                }
                model.means[j][d] = mean;
                model.variances[j][d] = (var / mass).max(VARIANCE_FLOOR);
            }
        }
        // renormalize in case of re-seeding
        let wsum: f64 = model.weights.iter().sum();
        for w in &mut model.weights {
            *w /= wsum;
        }

        if !reseeded && (ll - prev_ll).abs() < tol && prev_ll.is_finite() {
            converged = true;
            break;
        }
        prev_ll = ll;
    }

    Ok(EmFit {
        model,
        log_likelihood_trace: trace,
        iterations,
        converged,
    })
}

/// k-means++ seeding: first center uniform, then proportional to squared
/// distance from the nearest chosen center.
fn kmeans_pp_seeds(data: &[FeatureVector], k: usize, rng: &mut RandomStream) -> Vec<Vec<f64>> {
    let n = data.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(data[rng.next_index(n)].clone());
    let mut d2: Vec<f64> = data.iter().map(|z| sq_dist(z, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            rng.next_index(n)
        } else {
            let mut target = rng.next_f64() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        };
        centers.push(data[next].clone());
        for (i, z) in data.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(z, centers.last().unwrap()));
        }
    }
    centers
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
