//! Uncertainty-calibration metrics: sparsification curves (AUSC/AUSE) and
//! Mann-Whitney AUROC for evidence-based OOD separation.

use crate::error::{Error, Result};

/// Minimum number of points for a sparsification curve.
pub const MIN_SPARSIFICATION_POINTS: usize = 10;

/// A sparsification curve over retention levels k = 1..100 (percent).
///
/// `curve[k-1]` is the mean error of the k% most-certain points (ascending
/// uncertainty); `oracle[k-1]` uses ascending true error instead, the best
/// achievable ordering.
#[derive(Debug, Clone)]
pub struct SparsificationCurve {
    pub curve: Vec<f64>,
    pub oracle: Vec<f64>,
}

impl SparsificationCurve {
    /// Area under the curve, trapezoidal over k in [0, 100] with the k -> 0
    /// end anchored at the 1% value (so a flat curve at error e integrates to
    /// exactly 100 e).
    pub fn ausc(&self) -> f64 {
        trapezoid_area(&self.curve)
    }

    /// Area between the curve and its oracle, same convention.
    pub fn ause(&self) -> f64 {
        let diff: Vec<f64> = self
            .curve
            .iter()
            .zip(&self.oracle)
            .map(|(c, o)| (c - o).abs())
            .collect();
        trapezoid_area(&diff)
    }
}

fn trapezoid_area(values: &[f64]) -> f64 {
    // values[k-1] for k = 1..=100; anchor k = 0 at values[0]
    let mut area = 0.0;
    let mut prev = values[0];
    for &v in values {
        area += 0.5 * (prev + v);
        prev = v;
    }
    area
}

fn sorted_indices_by(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Sparsification curve of `errors` ordered by `uncertainties`.
pub fn sparsification_curve(
    errors: &[f64],
    uncertainties: &[f64],
) -> Result<SparsificationCurve> {
    if errors.len() != uncertainties.len() {
        return Err(Error::LengthMismatch {
            left: errors.len(),
            right: uncertainties.len(),
        });
    }
    let n = errors.len();
    if n < MIN_SPARSIFICATION_POINTS {
        return Err(Error::TooFewSamples {
            min: MIN_SPARSIFICATION_POINTS,
            got: n,
        });
    }
    if errors.iter().chain(uncertainties).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sparsification input"));
    }

    let by_unc = sorted_indices_by(uncertainties);
    let by_err = sorted_indices_by(errors);

    // prefix sums of errors in each ordering
    let prefix = |order: &[usize]| -> Vec<f64> {
        let mut acc = 0.0;
        order
            .iter()
            .map(|&i| {
                acc += errors[i];
                acc
            })
            .collect()
    };
    let pref_unc = prefix(&by_unc);
    let pref_err = prefix(&by_err);

    let mut curve = Vec::with_capacity(100);
    let mut oracle = Vec::with_capacity(100);
    for k in 1..=100usize {
        let count = ((k * n).div_ceil(100)).clamp(1, n);
        curve.push(pref_unc[count - 1] / count as f64);
        oracle.push(pref_err[count - 1] / count as f64);
    }
    Ok(SparsificationCurve { curve, oracle })
}

/// (AUSC, AUSE) of `errors` under the given uncertainty ordering.
pub fn sparsification(errors: &[f64], uncertainties: &[f64]) -> Result<(f64, f64)> {
    let c = sparsification_curve(errors, uncertainties)?;
    Ok((c.ausc(), c.ause()))
}

/// Mann-Whitney AUROC of `-evidence` as the OOD score: the probability that a
/// random OOD sample has lower evidence than a random ID sample, ties counted
/// half.
///
/// Group-based rank counting; exact integer-and-half arithmetic, so the result
/// matches brute-force pair counting bit for bit.
pub fn ood_auroc(evidences: &[f64], is_ood: &[bool]) -> Result<f64> {
    if evidences.len() != is_ood.len() {
        return Err(Error::LengthMismatch {
            left: evidences.len(),
            right: is_ood.len(),
        });
    }
    if evidences.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("evidence"));
    }
    let n_ood = is_ood.iter().filter(|&&o| o).count();
    let n_id = is_ood.len() - n_ood;
    if n_ood == 0 || n_id == 0 {
        return Err(Error::SingleClass);
    }

    // ascending evidence; OOD wins against every ID strictly above it
    let order = sorted_indices_by(evidences);
    let mut wins = 0.0f64;
    let mut id_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        // group of tied evidence values
        let mut j = i;
        let (mut ood_here, mut id_here) = (0usize, 0usize);
        while j < order.len() && evidences[order[j]] == evidences[order[i]] {
            if is_ood[order[j]] {
                ood_here += 1;
            } else {
                id_here += 1;
            }
            j += 1;
        }
        let id_above = n_id - id_below - id_here;
        wins += ood_here as f64 * id_above as f64 + 0.5 * (ood_here * id_here) as f64;
        id_below += id_here;
        i = j;
    }
    Ok(wins / (n_ood as f64 * n_id as f64))
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewSamples { min: 2, got: a.len() });
    }
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        let x = ra[i] - mean;
        let y = rb[i] - mean;
        num += x * y;
        da += x * x;
        db += y * y;
    }
    if da == 0.0 || db == 0.0 {
        return Err(Error::Parse("constant input to spearman".into()));
    }
    Ok(num / (da * db).sqrt())
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let order = sorted_indices_by(values);
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // average rank for the tie group, 1-based
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            out[idx] = avg;
        }
        i = j;
    }
    out
}
