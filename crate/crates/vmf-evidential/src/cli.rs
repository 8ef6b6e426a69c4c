//! The `vmfe` command-line surface.
//!
//! Subcommands cover sampling, density evaluation, posterior updates, loss
//! evaluation, Monte-Carlo verification, GMM fitting and scoring, synthetic
//! dataset generation, experiment fitting, and sparsification reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
//! failure. All errors are written to standard error as single-line JSON
//! `{"error": ...}`. Floats in CSV/JSONL streams are printed with 17
//! significant digits so values round-trip exactly.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::CliConfig;
use crate::error::{Error, Result};
use crate::experiments::{fit, gen_dataset, FitReport, LossKind, OptConfig};
use crate::gmm::{fit_em, GmmModel};
use crate::losses::{bayesian_loss, cosine_loss, nll_loss, BayesianLossConfig};
use crate::mc::{default_grid, pass_fraction, verify_ell_grid, SamplerKind};
use crate::metrics::sparsification_curve;
use crate::natpn::{posterior_update, Evidence};
use crate::power_spherical::PsParams;
use crate::rng::RandomStream;
use crate::sphere::UnitVector3;
use crate::vmf::{conjugate_posterior, VmfParams};

/// Environment variable consulted for the default seed when neither a flag
/// nor a config file provides one.
pub const SEED_ENV_VAR: &str = "VMFE_SEED";

const USAGE_ERROR: i32 = 1;
const DATA_ERROR: i32 = 2;
const VERIFICATION_FAILURE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "vmfe",
    about = "Evidential learning toolkit for directional data",
    version
)]
struct Cli {
    /// Key-value configuration file (one `key = value` per line).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Vmf,
    Ps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    Vmf,
    Ps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Loss {
    Cosine,
    Nll,
    Bayesian,
}

impl From<Loss> for LossKind {
    fn from(l: Loss) -> Self {
        match l {
            Loss::Cosine => LossKind::Cosine,
            Loss::Nll => LossKind::Nll,
            Loss::Bayesian => LossKind::Bayesian,
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// Input file (defaults to standard input).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file (defaults to standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw unit vectors from a vMF or Power Spherical distribution (JSONL).
    Sample {
        family: Family,
        /// Mean direction as a comma-separated triple, e.g. 0,0,1.
        #[arg(long)]
        mu: String,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate log-densities of JSONL unit vectors (CSV out).
    Logpdf {
        family: Family,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        kappa: f64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Natural-parameter posterior update of a vMF prior by one observation.
    Posterior {
        #[arg(long)]
        prior_mu: String,
        #[arg(long)]
        prior_kappa: f64,
        #[arg(long)]
        obs_mu: String,
        #[arg(long)]
        evidence: f64,
        /// Exact-conjugate semantics: concentration = natural-parameter norm.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate cosine, NLL, and Bayesian losses on a JSONL batch (CSV out).
    LossEval {
        /// Entropy discount (overrides the config file).
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Verify analytic expected log-likelihoods against Monte Carlo on the
    /// standard grid (CSV out; exit 3 if more than 1% of z-scores reach 3).
    VerifyMc {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "vmf")]
        sampler: Sampler,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit a diagonal-covariance GMM to JSONL feature vectors (model JSON).
    GmmFit {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Score JSONL feature vectors under a fitted GMM (CSV out).
    GmmDensity {
        /// Model JSON produced by gmm-fit.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Generate a synthetic dataset (JSONL).
    Synth {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the synthetic experiment and emit a fit report (JSON).
    Fit {
        #[arg(long, value_enum)]
        loss: Loss,
        #[arg(long)]
        seed: Option<u64>,
        /// Run this many consecutive seeds (JSON array out).
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute AUSC/AUSE from an error,uncertainty CSV.
    Sparsify {
        #[command(flatten)]
        io: IoArgs,
        /// Also write the sparsification curve as CSV (k, curve, oracle_curve).
        #[arg(long)]
        curve: Option<PathBuf>,
    },
}

/// Run the CLI; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            emit_error(&e.to_string());
            return USAGE_ERROR;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            emit_error(&e.to_string());
            DATA_ERROR
        }
    }
}

fn emit_error(msg: &str) {
    let line = serde_json::json!({ "error": msg });
    eprintln!("{line}");
}

fn dispatch(cli: Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    match cli.command {
        Command::Sample {
            family,
            mu,
            kappa,
            n,
            seed,
            output,
        } => cmd_sample(family, &mu, kappa, n, resolve_seed(seed, &config), output),
        Command::Logpdf { family, mu, kappa, io } => cmd_logpdf(family, &mu, kappa, io),
        Command::Posterior {
            prior_mu,
            prior_kappa,
            obs_mu,
            evidence,
            exact,
            output,
        } => cmd_posterior(&prior_mu, prior_kappa, &obs_mu, evidence, exact, output),
        Command::LossEval { gamma, io } => {
            let gamma = gamma.or(config.gamma).unwrap_or(1e-3);
            cmd_loss_eval(gamma, io)
        }
        Command::VerifyMc {
            samples,
            seed,
            sampler,
            output,
        } => {
            let samples = samples.or(config.mc_samples).unwrap_or(100_000);
            cmd_verify_mc(samples, resolve_seed(seed, &config), sampler, output)
        }
        Command::GmmFit {
            k,
            max_iters,
            tol,
            seed,
            io,
        } => {
            let k = k.or(config.gmm_k).unwrap_or(20);
            cmd_gmm_fit(k, max_iters, tol, resolve_seed(seed, &config), io)
        }
        Command::GmmDensity { model, io } => cmd_gmm_density(&model, io),
        Command::Synth { seed, output } => {
            let synth = config.synth_config(seed.or_else(env_seed));
            let ds = gen_dataset(&synth)?;
            let mut out = open_output(output)?;
            ds.write_jsonl(&mut out)?;
            Ok(0)
        }
        Command::Fit {
            loss,
            seed,
            seeds,
            iterations,
            output,
        } => cmd_fit(loss.into(), seed, seeds, iterations, &config, output),
        Command::Sparsify { io, curve } => cmd_sparsify(io, curve),
    }
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV_VAR).ok().and_then(|v| v.parse().ok())
}

fn resolve_seed(flag: Option<u64>, config: &CliConfig) -> u64 {
    flag.or(config.seed).or_else(env_seed).unwrap_or(0)
}

/// Parse a comma-separated vector triple; normalize with a warning when the
/// norm deviates from 1 by more than 1e-6.
fn parse_unit_vector(s: &str, what: &str) -> Result<UnitVector3> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "{what}: expected three comma-separated components, got `{s}`"
        )));
    }
    let mut v = [0.0f64; 3];
    for (slot, tok) in v.iter_mut().zip(&parts) {
        *slot = tok
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{what}: invalid component `{tok}`")))?;
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: {what} has norm {norm:.6}; normalizing");
    }
    UnitVector3::new(v[0], v[1], v[2])
}

fn open_output(path: Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

fn open_input(path: Option<PathBuf>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(std::fs::File::open(p)?)),
        None => Box::new(BufReader::new(std::io::stdin())),
    })
}

/// 17 significant digits: exact round trip through decimal.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_sample(
    family: Family,
    mu: &str,
    kappa: f64,
    n: usize,
    seed: u64,
    output: Option<PathBuf>,
) -> Result<i32> {
    let mu = parse_unit_vector(mu, "--mu")?;
    let mut rng = RandomStream::new(seed);
    let mut out = open_output(output)?;
    let draws = match family {
        Family::Vmf => VmfParams::new(mu, kappa)?.sample(n, &mut rng),
        Family::Ps => PsParams::new(mu, kappa)?.sample(n, &mut rng),
    };
    for x in draws {
        writeln!(out, "[{},{},{}]", fmt(x.x()), fmt(x.y()), fmt(x.z()))?;
    }
    Ok(0)
}

fn read_jsonl_vectors(input: Option<PathBuf>) -> Result<Vec<UnitVector3>> {
    let reader = open_input(input)?;
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str::<UnitVector3>(&line)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("vector stream"));
    }
    Ok(out)
}

fn cmd_logpdf(family: Family, mu: &str, kappa: f64, io: IoArgs) -> Result<i32> {
    let mu = parse_unit_vector(mu, "--mu")?;
    let xs = read_jsonl_vectors(io.input)?;
    let mut out = open_output(io.output)?;
    writeln!(out, "x,y,z,log_pdf")?;
    match family {
        Family::Vmf => {
            let p = VmfParams::new(mu, kappa)?;
            for x in xs {
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt(x.x()),
                    fmt(x.y()),
                    fmt(x.z()),
                    fmt(p.log_pdf(x))
                )?;
            }
        }
        Family::Ps => {
            let p = PsParams::new(mu, kappa)?;
            for x in xs {
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt(x.x()),
                    fmt(x.y()),
                    fmt(x.z()),
                    fmt(p.log_pdf(x))
                )?;
            }
        }
    }
    Ok(0)
}

fn cmd_posterior(
    prior_mu: &str,
    prior_kappa: f64,
    obs_mu: &str,
    evidence: f64,
    exact: bool,
    output: Option<PathBuf>,
) -> Result<i32> {
    let prior = VmfParams::new(parse_unit_vector(prior_mu, "--prior-mu")?, prior_kappa)?;
    let obs = parse_unit_vector(obs_mu, "--obs-mu")?;
    let mut out = open_output(output)?;
    let doc = if exact {
        // conjugate semantics: the evidence weights the observation inside
        // the natural parameter and the posterior concentration is its norm
        let post = conjugate_posterior(&prior, evidence, &[obs])?;
        serde_json::json!({
            "mu": post.mu(),
            "kappa": post.kappa(),
            "semantics": "exact-conjugate",
        })
    } else {
        let up = posterior_update(&prior, obs, Evidence::new(evidence)?)?;
        serde_json::json!({
            "mu": up.posterior.mu(),
            "kappa": up.posterior.kappa(),
            "interp_norm": up.interp_norm,
            "semantics": "additive",
        })
    };
    writeln!(out, "{doc}")?;
    Ok(0)
}

#[derive(serde::Deserialize)]
struct LossRecord {
    target: UnitVector3,
    mu: UnitVector3,
    kappa: f64,
    prior_mu: UnitVector3,
    prior_kappa: f64,
    evidence: f64,
}

fn cmd_loss_eval(gamma: f64, io: IoArgs) -> Result<i32> {
    let reader = open_input(io.input)?;
    let cfg = BayesianLossConfig::new(gamma)?;
    let mut out = open_output(io.output)?;
    writeln!(out, "index,cosine,nll,bayesian")?;
    let mut index = 0usize;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LossRecord = serde_json::from_str(&line)?;
        let pred = VmfParams::new(rec.mu, rec.kappa)?;
        let prior = VmfParams::new(rec.prior_mu, rec.prior_kappa)?;
        let up = posterior_update(&prior, rec.mu, Evidence::new(rec.evidence)?)?;
        let bl = bayesian_loss(&up.posterior, rec.kappa, rec.target, &cfg)?;
        writeln!(
            out,
            "{index},{},{},{}",
            fmt(cosine_loss(rec.mu, rec.target)),
            fmt(nll_loss(&pred, rec.target)),
            fmt(bl)
        )?;
        index += 1;
    }
    if index == 0 {
        return Err(Error::EmptyInput("loss batch"));
    }
    Ok(0)
}

fn cmd_verify_mc(
    samples: usize,
    seed: u64,
    sampler: Sampler,
    output: Option<PathBuf>,
) -> Result<i32> {
    let kind = match sampler {
        Sampler::Vmf => SamplerKind::Vmf,
        Sampler::Ps => SamplerKind::Ps,
    };
    let rng = RandomStream::new(seed);
    let points = verify_ell_grid(&default_grid(), samples, &rng, kind)?;
    let mut out = open_output(output)?;
    writeln!(out, "kappa_post,kappa_lik,dot,analytic,mc_value,std_error,z")?;
    for p in &points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(p.kappa_post),
            fmt(p.kappa_lik),
            fmt(p.dot),
            fmt(p.analytic),
            fmt(p.mc_value),
            fmt(p.std_error),
            fmt(p.z)
        )?;
    }
    drop(out);
    let frac = pass_fraction(&points, 3.0);
    if kind == SamplerKind::Ps {
        // surrogate bias is reported, never gated
        eprintln!("surrogate run: pass fraction {frac:.3} (informational)");
        return Ok(0);
    }
    if frac >= 0.99 {
        eprintln!("verify-mc: PASS ({frac:.3} of grid points within 3 SE)");
        Ok(0)
    } else {
        eprintln!("verify-mc: FAIL ({frac:.3} of grid points within 3 SE)");
        Ok(VERIFICATION_FAILURE)
    }
}

/// Features arrive either as bare JSON arrays or as objects with a
/// `feature` field (the dataset JSONL format).
fn read_jsonl_features(input: Option<PathBuf>) -> Result<Vec<Vec<f64>>> {
    let reader = open_input(input)?;
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)?;
        let arr = match &value {
            serde_json::Value::Array(_) => value.clone(),
            serde_json::Value::Object(map) => map
                .get("feature")
                .cloned()
                .ok_or_else(|| Error::Parse("record has no `feature` field".into()))?,
            _ => return Err(Error::Parse("expected array or object per line".into())),
        };
        let feats: Vec<f64> = serde_json::from_value(arr)?;
        out.push(feats);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("feature stream"));
    }
    Ok(out)
}

fn cmd_gmm_fit(k: usize, max_iters: usize, tol: f64, seed: u64, io: IoArgs) -> Result<i32> {
    let data = read_jsonl_features(io.input)?;
    let mut rng = RandomStream::new(seed);
    let em = fit_em(&data, k, max_iters, tol, &mut rng)?;
    let mut out = open_output(io.output)?;
    writeln!(out, "{}", serde_json::to_string(&em.model)?)?;
    Ok(0)
}

fn cmd_gmm_density(model_path: &std::path::Path, io: IoArgs) -> Result<i32> {
    let model: GmmModel = serde_json::from_str(&std::fs::read_to_string(model_path)?)?;
    let data = read_jsonl_features(io.input)?;
    let mut out = open_output(io.output)?;
    writeln!(out, "index,log_density")?;
    for (i, z) in data.iter().enumerate() {
        writeln!(out, "{i},{}", fmt(model.log_density(z)?))?;
    }
    Ok(0)
}

fn cmd_fit(
    kind: LossKind,
    seed: Option<u64>,
    seeds: Option<usize>,
    iterations: Option<usize>,
    config: &CliConfig,
    output: Option<PathBuf>,
) -> Result<i32> {
    let mut opt = OptConfig::default();
    if let Some(g) = config.gamma {
        opt.gamma = g;
    }
    if let Some(n_h) = config.n_h {
        opt.n_h = Some(n_h);
    }
    if let Some(m) = config.m_max {
        opt.m_max = m;
    }
    if let Some(k) = config.gmm_k {
        opt.gmm_k = k;
    }
    if let Some(it) = iterations {
        opt.iterations = it;
    }
    let base_seed = resolve_seed(seed, config);

    let run_one = |s: u64| -> Result<FitReport> {
        let synth = config.synth_config(Some(s));
        let ds = gen_dataset(&synth)?;
        fit(&ds, kind, &opt)
    };

    let mut out = open_output(output)?;
    match seeds {
        None | Some(1) => {
            let report = run_one(base_seed)?;
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        Some(n) => {
            // independent seeds on worker threads, results in seed order
            let mut slots: Vec<Option<Result<FitReport>>> = Vec::new();
            slots.resize_with(n, || None);
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for i in 0..n {
                    let s = base_seed + i as u64;
                    handles.push((i, scope.spawn(move || run_one(s))));
                }
                for (i, h) in handles {
                    slots[i] = Some(h.join().expect("fit worker panicked"));
                }
            });
            let reports = slots
                .into_iter()
                .map(|r| r.expect("slot filled"))
                .collect::<Result<Vec<_>>>()?;
            writeln!(out, "{}", serde_json::to_string(&reports)?)?;
        }
    }
    Ok(0)
}

fn cmd_sparsify(io: IoArgs, curve_path: Option<PathBuf>) -> Result<i32> {
    let reader = open_input(io.input)?;
    let mut errors = Vec::new();
    let mut uncertainties = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if i == 0 && trimmed.starts_with("error") {
            continue; // header
        }
        let mut parts = trimmed.split(',');
        let (Some(e), Some(u)) = (parts.next(), parts.next()) else {
            return Err(Error::Parse(format!(
                "line {}: expected `error,uncertainty`",
                i + 1
            )));
        };
        errors.push(
            e.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: invalid error `{e}`", i + 1)))?,
        );
        uncertainties.push(
            u.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: invalid uncertainty `{u}`", i + 1)))?,
        );
    }
    let curve = sparsification_curve(&errors, &uncertainties)?;
    if let Some(path) = curve_path {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "k,curve,oracle_curve")?;
        for (i, (c, o)) in curve.curve.iter().zip(&curve.oracle).enumerate() {
            writeln!(w, "{},{},{}", i + 1, fmt(*c), fmt(*o))?;
        }
    }
    let mut out = open_output(io.output)?;
    writeln!(
        out,
        "{}",
        serde_json::json!({ "ausc": curve.ausc(), "ause": curve.ause() })
    )?;
    Ok(0)
}
