//! Key-value configuration files: one `key = value` per line, `#` comments
//! and blank lines ignored. Unknown keys are rejected and every value is
//! range-checked at parse time.

use crate::error::{Error, Result};
use crate::experiments::SynthConfig;

/// Parsed configuration. All fields optional; callers overlay them onto
/// defaults (command-line flags take precedence over file values).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliConfig {
    pub n_h: Option<f64>,
    pub gamma: Option<f64>,
    pub t_bins: Option<usize>,
    pub m_max: Option<f64>,
    pub gmm_k: Option<usize>,
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
    // SynthConfig keys
    pub cluster_count: Option<usize>,
    pub points_per_cluster: Option<usize>,
    pub true_kappas: Option<Vec<f64>>,
    pub feature_dim: Option<usize>,
    pub feature_noise_sigma: Option<f64>,
    pub ood_shift: Option<f64>,
}

impl CliConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = CliConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let ctx = |what: &str| format!("line {}: {what}", lineno + 1);
            match key {
                "n_h" => {
                    let v = parse_f64(value, &ctx("n_h"))?;
                    if v <= 0.0 {
                        return Err(Error::Parse(ctx("n_h must be positive")));
                    }
                    cfg.n_h = Some(v);
                }
                "gamma" => {
                    let v = parse_f64(value, &ctx("gamma"))?;
                    if v < 0.0 {
                        return Err(Error::Parse(ctx("gamma must be >= 0")));
                    }
                    cfg.gamma = Some(v);
                }
                "t_bins" => {
                    let v = parse_usize(value, &ctx("t_bins"))?;
                    if v < 2 {
                        return Err(Error::Parse(ctx("t_bins must be >= 2")));
                    }
                    cfg.t_bins = Some(v);
                }
                "m_max" => {
                    let v = parse_f64(value, &ctx("m_max"))?;
                    if v <= 0.0 {
                        return Err(Error::Parse(ctx("m_max must be positive")));
                    }
                    cfg.m_max = Some(v);
                }
                "gmm_k" => {
                    let v = parse_usize(value, &ctx("gmm_k"))?;
                    if v == 0 {
                        return Err(Error::Parse(ctx("gmm_k must be >= 1")));
                    }
                    cfg.gmm_k = Some(v);
                }
                "seed" => {
                    cfg.seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(ctx(&format!("invalid seed `{value}`"))))?,
                    );
                }
                "mc_samples" => {
                    let v = parse_usize(value, &ctx("mc_samples"))?;
                    if v < 100 {
                        return Err(Error::Parse(ctx("mc_samples must be >= 100")));
                    }
                    cfg.mc_samples = Some(v);
                }
                "cluster_count" => {
                    let v = parse_usize(value, &ctx("cluster_count"))?;
                    if v == 0 {
                        return Err(Error::Parse(ctx("cluster_count must be >= 1")));
                    }
                    cfg.cluster_count = Some(v);
                }
                "points_per_cluster" => {
                    let v = parse_usize(value, &ctx("points_per_cluster"))?;
                    if v < 5 {
                        return Err(Error::Parse(ctx("points_per_cluster must be >= 5")));
                    }
                    cfg.points_per_cluster = Some(v);
                }
                "true_kappas" => {
                    let kappas = value
                        .split(',')
                        .map(|tok| parse_f64(tok.trim(), &ctx("true_kappas entry")))
                        .collect::<Result<Vec<f64>>>()?;
                    if kappas.is_empty() || kappas.iter().any(|k| *k <= 0.0) {
                        return Err(Error::Parse(ctx("true_kappas must be positive")));
                    }
                    cfg.true_kappas = Some(kappas);
                }
                "feature_dim" => {
                    let v = parse_usize(value, &ctx("feature_dim"))?;
                    if v == 0 {
                        return Err(Error::Parse(ctx("feature_dim must be >= 1")));
                    }
                    cfg.feature_dim = Some(v);
                }
                "feature_noise_sigma" => {
                    let v = parse_f64(value, &ctx("feature_noise_sigma"))?;
                    if v < 0.0 {
                        return Err(Error::Parse(ctx("feature_noise_sigma must be >= 0")));
                    }
                    cfg.feature_noise_sigma = Some(v);
                }
                "ood_shift" => {
                    let v = parse_f64(value, &ctx("ood_shift"))?;
                    if v < 0.0 {
                        return Err(Error::Parse(ctx("ood_shift must be >= 0")));
                    }
                    cfg.ood_shift = Some(v);
                }
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )));
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Overlay onto the default synthetic configuration.
    pub fn synth_config(&self, seed_override: Option<u64>) -> SynthConfig {
        let mut cfg = SynthConfig::default();
        if let Some(v) = self.cluster_count {
            cfg.cluster_count = v;
        }
        if let Some(v) = self.points_per_cluster {
            cfg.points_per_cluster = v;
        }
        if let Some(v) = &self.true_kappas {
            cfg.true_kappas = v.clone();
        }
        if let Some(v) = self.feature_dim {
            cfg.feature_dim = v;
        }
        if let Some(v) = self.feature_noise_sigma {
            cfg.feature_noise_sigma = v;
        }
        if let Some(v) = self.ood_shift {
            cfg.ood_shift = v;
        }
        if let Some(s) = seed_override.or(self.seed) {
            cfg.seed = s;
        }
        cfg
    }
}

fn parse_f64(s: &str, ctx: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("{ctx}: invalid number `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{ctx}: value must be finite")));
    }
    Ok(v)
}

fn parse_usize(s: &str, ctx: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("{ctx}: invalid count `{s}`")))
}
