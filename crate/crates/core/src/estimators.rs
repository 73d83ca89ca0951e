//! Average-treatment-effect estimators.
//!
//! All estimators return a first-class result: an estimate may be undefined
//! when an effective group is empty, and the caller decides the policy.

use crate::error::{Error, Result};
use crate::exposure::{ExposureProbabilities, Side};

/// Outcome of one estimator on one realized experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    /// `None` exactly when an effective group needed by the estimator is empty.
    pub estimate: Option<f64>,
    pub n_effective_treated: usize,
    pub n_effective_control: usize,
    /// Smallest inverse-probability weight over flagged vertices, for
    /// weighted estimators.
    pub min_weight: Option<f64>,
    /// Largest inverse-probability weight over flagged vertices.
    pub max_weight: Option<f64>,
}

impl EstimatorResult {
    fn unweighted(estimate: Option<f64>, n1: usize, n0: usize) -> EstimatorResult {
        EstimatorResult {
            estimate,
            n_effective_treated: n1,
            n_effective_control: n0,
            min_weight: None,
            max_weight: None,
        }
    }
}

/// Difference in sample means between treated and control vertices.
/// Undefined when either group is empty.
pub fn diff_in_means(y: &[f64], z: &[u8]) -> EstimatorResult {
    assert_eq!(y.len(), z.len());
    let ind1: Vec<bool> = z.iter().map(|&b| b == 1).collect();
    let ind0: Vec<bool> = z.iter().map(|&b| b == 0).collect();
    exposure_diff_in_means(y, &ind1, &ind0)
}

/// Unweighted difference in means over the effectively treated and
/// effectively control vertices. Undefined when either flagged set is empty.
pub fn exposure_diff_in_means(y: &[f64], ind1: &[bool], ind0: &[bool]) -> EstimatorResult {
    assert_eq!(y.len(), ind1.len());
    assert_eq!(y.len(), ind0.len());
    let side_mean = |flags: &[bool]| -> (usize, f64) {
        let mut count = 0usize;
        let mut sum = 0.0;
        for (v, &f) in y.iter().zip(flags) {
            if f {
                count += 1;
                sum += v;
            }
        }
        (count, sum)
    };
    let (n1, sum1) = side_mean(ind1);
    let (n0, sum0) = side_mean(ind0);
    if n1 == 0 || n0 == 0 {
        return EstimatorResult::unweighted(None, n1, n0);
    }
    EstimatorResult::unweighted(Some(sum1 / n1 as f64 - sum0 / n0 as f64), n1, n0)
}

struct WeightedSide {
    count: usize,
    weight_sum: f64,
    weighted_outcome_sum: f64,
}

fn weighted_side(
    y: &[f64],
    flags: &[bool],
    pi: &[f64],
    track: &mut (f64, f64),
) -> Result<WeightedSide> {
    let mut acc = WeightedSide {
        count: 0,
        weight_sum: 0.0,
        weighted_outcome_sum: 0.0,
    };
    for i in 0..y.len() {
        if !flags[i] {
            continue;
        }
        if pi[i] <= 0.0 {
            return Err(Error::ZeroExposureProbability { vertex: i });
        }
        let w = 1.0 / pi[i];
        track.0 = track.0.min(w);
        track.1 = track.1.max(w);
        acc.count += 1;
        acc.weight_sum += w;
        acc.weighted_outcome_sum += w * y[i];
    }
    Ok(acc)
}

/// Ratio-normalized inverse-probability-weighted difference in means: each
/// side is the weighted mean of flagged outcomes with weights `1 / pi_i`,
/// normalized by its own weight sum. Undefined when a flagged side is
/// empty; a flagged vertex with zero exposure probability is a hard error.
pub fn hajek(
    y: &[f64],
    ind1: &[bool],
    ind0: &[bool],
    pi: &ExposureProbabilities,
) -> Result<EstimatorResult> {
    assert_eq!(y.len(), ind1.len());
    assert_eq!(y.len(), ind0.len());
    let mut track = (f64::INFINITY, f64::NEG_INFINITY);
    let side1 = weighted_side(y, ind1, pi.on(Side::Treatment), &mut track)?;
    let side0 = weighted_side(y, ind0, pi.on(Side::Control), &mut track)?;
    let estimate = if side1.count == 0 || side0.count == 0 {
        None
    } else {
        Some(
            side1.weighted_outcome_sum / side1.weight_sum
                - side0.weighted_outcome_sum / side0.weight_sum,
        )
    };
    Ok(EstimatorResult {
        estimate,
        n_effective_treated: side1.count,
        n_effective_control: side0.count,
        min_weight: track.0.is_finite().then_some(track.0),
        max_weight: track.1.is_finite().then_some(track.1),
    })
}

/// Horvitz--Thompson estimator: `(1/n) * sum(y_i / pi_i(1))` over flagged
/// treated minus the same over flagged control. Empty sides contribute 0
/// rather than making the estimate undefined.
pub fn horvitz_thompson(
    y: &[f64],
    ind1: &[bool],
    ind0: &[bool],
    pi: &ExposureProbabilities,
    n: usize,
) -> Result<EstimatorResult> {
    assert_eq!(y.len(), ind1.len());
    assert_eq!(y.len(), ind0.len());
    assert!(n > 0);
    let mut track = (f64::INFINITY, f64::NEG_INFINITY);
    let side1 = weighted_side(y, ind1, pi.on(Side::Treatment), &mut track)?;
    let side0 = weighted_side(y, ind0, pi.on(Side::Control), &mut track)?;
    let estimate = (side1.weighted_outcome_sum - side0.weighted_outcome_sum) / n as f64;
    Ok(EstimatorResult {
        estimate: Some(estimate),
        n_effective_treated: side1.count,
        n_effective_control: side0.count,
        min_weight: track.0.is_finite().then_some(track.0),
        max_weight: track.1.is_finite().then_some(track.1),
    })
}
