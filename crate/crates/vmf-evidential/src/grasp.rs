//! Contact-grasp geometry: baseline/approach/width tuples, quantized approach
//! bins perpendicular to the baseline, and rigid-pose assembly.
//!
//! A grasp factorizes hierarchically given a contact point: baseline direction
//! first (the vMF posterior), then an approach direction chosen among `T`
//! candidate bins fanning over a half turn perpendicular to the baseline, then
//! the width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sphere::{Rotation3, UnitVector3, Vec3};
use crate::vmf::VmfParams;

/// Default number of approach bins (15 degree spacing over 0-180).
pub const DEFAULT_BIN_COUNT: usize = 12;

/// A contact grasp: contact point (m), baseline and approach directions,
/// width (m), quality in [0, 1], and the posterior concentration that
/// produced the baseline (the grasp's total-uncertainty score).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContactGrasp {
    pub contact: Vec3,
    pub baseline: UnitVector3,
    pub approach: UnitVector3,
    pub width: f64,
    pub quality: f64,
    #[serde(rename = "kappa_post")]
    pub total_concentration: f64,
}

impl ContactGrasp {
    pub fn validate(&self) -> Result<()> {
        if self.width < 0.0 {
            return Err(Error::NegativeWidth(self.width));
        }
        if !(0.0..=1.0).contains(&self.quality) {
            return Err(Error::ProbabilityOutOfRange(self.quality));
        }
        if self.baseline.dot(self.approach).abs() > 1e-6 {
            return Err(Error::DegenerateFrame);
        }
        Ok(())
    }
}

/// Scored approach bins for one baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproachBins {
    pub directions: Vec<UnitVector3>,
    pub scores: Vec<f64>,
}

impl ApproachBins {
    pub fn new(directions: Vec<UnitVector3>, scores: Vec<f64>) -> Result<Self> {
        if directions.len() != scores.len() {
            return Err(Error::LengthMismatch {
                left: directions.len(),
                right: scores.len(),
            });
        }
        if directions.is_empty() {
            return Err(Error::EmptyInput("approach bins"));
        }
        Ok(Self { directions, scores })
    }
}

/// `t_count` directions perpendicular to `baseline` at angles `t pi / T`,
/// t = 0 .. T-1 (half-open: the bins cover 0-180 degrees).
///
/// The zero-angle reference is the world-down direction (0,0,-1) projected
/// onto the plane perpendicular to the baseline — the tabletop convention
/// where bins fan away from the support plane. When the baseline is within
/// 1e-9 of vertical the reference falls back to the x-axis projection.
pub fn bin_directions(baseline: UnitVector3, t_count: usize) -> Result<Vec<UnitVector3>> {
    if t_count < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: t_count,
        });
    }
    let down = -UnitVector3::Z;
    let reference = if baseline.dot(down).abs() > 1.0 - 1e-9 {
        UnitVector3::X
    } else {
        down
    };
    let r0 = (reference.as_vec3() - baseline.scale(baseline.dot(reference)))
        .normalized()
        .expect("reference is never parallel to baseline");
    let step = std::f64::consts::PI / t_count as f64;
    Ok((0..t_count)
        .map(|t| {
            Rotation3::from_axis_angle(baseline, t as f64 * step).apply_unit(r0)
        })
        .collect())
}

/// Cosine targets `target^T bin_t` for soft bin-score supervision.
pub fn soft_bin_targets(true_approach: UnitVector3, bins: &[UnitVector3]) -> Vec<f64> {
    bins.iter().map(|b| true_approach.dot(*b)).collect()
}

/// Direction with the maximal score; ties break to the lowest bin index.
pub fn select_approach(bins: &ApproachBins) -> UnitVector3 {
    let mut best = 0;
    for (i, s) in bins.scores.iter().enumerate() {
        if *s > bins.scores[best] {
            best = i;
        }
    }
    bins.directions[best]
}

/// How the baseline is realized from the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    /// Draw from the posterior vMF.
    Sample,
    /// Take the posterior mean.
    Deterministic,
}

/// Realize one grasp from a baseline posterior.
///
/// `score_fn` maps the bin directions to predicted scores; `width_fn` maps the
/// realized baseline to a width. Quality defaults to 1 (set it afterwards when
/// a quality head is available). The posterior concentration is recorded on
/// the grasp.
pub fn sample_grasp(
    contact: Vec3,
    posterior: &VmfParams,
    t_count: usize,
    score_fn: &dyn Fn(&[UnitVector3]) -> Vec<f64>,
    width_fn: &dyn Fn(UnitVector3) -> f64,
    mode: BaselineMode,
    rng: &mut RandomStream,
) -> Result<ContactGrasp> {
    let baseline = match mode {
        BaselineMode::Sample => posterior.sample_one(rng),
        BaselineMode::Deterministic => posterior.mu(),
    };
    let directions = bin_directions(baseline, t_count)?;
    let scores = score_fn(&directions);
    let bins = ApproachBins::new(directions, scores)?;
    let approach = select_approach(&bins);
    let width = width_fn(baseline);
    if width < 0.0 {
        return Err(Error::NegativeWidth(width));
    }
    Ok(ContactGrasp {
        contact,
        baseline,
        approach,
        width,
        quality: 1.0,
        total_concentration: posterior.kappa(),
    })
}

/// Rigid transform: rotation plus translation, in meters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RigidTransform {
    pub rotation: Rotation3,
    pub translation: Vec3,
}

/// Gripper pose from a grasp: rotation columns `(b, a x b, a)`, translation
/// at the midpoint between the two finger contacts `c + (w/2) b`.
///
/// The approach is re-orthonormalized against the baseline (tolerated skew
/// 1e-3); a parallel approach is an error.
pub fn assemble_pose(g: &ContactGrasp) -> Result<RigidTransform> {
    let b = g.baseline;
    let skew = g.approach.dot(b);
    let a_perp = g.approach.as_vec3() - b.scale(skew);
    if a_perp.norm() < 1e-6 {
        return Err(Error::DegenerateFrame);
    }
    let a = a_perp.normalized()?;
    let cross = a.cross(b).normalized()?;
    Ok(RigidTransform {
        rotation: Rotation3::from_columns(b.as_vec3(), cross.as_vec3(), a.as_vec3()),
        translation: g.contact + b.scale(g.width / 2.0),
    })
}
