//! Evidential learning for directional data on the unit sphere.
//!
//! The crate models 3-D unit directions with von Mises-Fisher (vMF)
//! distributions and treats prediction as Bayesian inference over the vMF
//! mean: a conjugate vMF prior is updated by density-scaled evidence, and the
//! resulting posterior is trained with an analytical second-order objective
//! (expected log-likelihood plus discounted posterior entropy). Closed forms
//! are verified against Monte-Carlo estimators throughout.
//!
//! Modules:
//!
//! - [`sphere`], [`special`], [`rng`] — unit-sphere primitives, stable special
//!   functions, deterministic random streams.
//! - [`vmf`] — density, entropy, exact sampling, conjugate posterior, MAP.
//! - [`power_spherical`] — the Power Spherical sampling surrogate.
//! - [`natpn`] — evidence, certainty budgets, natural-parameter posterior
//!   updates, and the associative evidence accumulator.
//! - [`losses`] — Bayesian/cosine/NLL objectives with analytic gradients, plus
//!   grasp-component losses (soft bins, width, BCE, extended Chamfer).
//! - [`gmm`] — diagonal-covariance Gaussian mixture for feature densities.
//! - [`grasp`] — contact-grasp geometry: approach bins, soft targets, poses.
//! - [`mc`] — Monte-Carlo verification harness with standard errors.
//! - [`metrics`] — sparsification (AUSC/AUSE) and OOD AUROC.
//! - [`experiments`] — synthetic benchmark: data generation, predictor
//!   fitting under each loss, and uncertainty-calibration reports.
//! - [`cli`] — the `vmfe` command-line surface.
//!
//! Runnable walkthroughs live under `examples/`; see the README for the list.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod gmm;
pub mod grasp;
pub mod losses;
pub mod mc;
pub mod metrics;
pub mod natpn;
pub mod power_spherical;
pub mod rng;
pub mod special;
pub mod sphere;
pub mod vmf;

pub use error::{Error, Result};
pub use rng::RandomStream;
pub use sphere::{UnitVector3, Vec3};
pub use vmf::VmfParams;
