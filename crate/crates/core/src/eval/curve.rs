use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    /// Cumulative counts behind the point.
    pub tp: u64,
    pub fp: u64,
}

/// Precision/recall after each detection of a confidence-ranked list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrCurve {
    pub num_gt: u64,
    pub points: Vec<PrPoint>,
}

/// Build the curve from true-positive flags in rank order.
///
/// Precision is `TP / (TP + FP)` and recall `TP / (TP + FN)` with
/// `TP + FN` fixed to the number of ground-truth boxes. A class without
/// ground truth has no recall and therefore no curve.
pub fn pr_curve(ranked_tp: &[bool], num_gt: u64) -> Result<PrCurve, EvalError> {
    if num_gt == 0 {
        return Err(EvalError::NoGroundTruth);
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let points = ranked_tp
        .iter()
        .map(|&is_tp| {
            if is_tp {
                tp += 1;
            } else {
                fp += 1;
            }
            PrPoint {
                recall: tp as f64 / num_gt as f64,
                precision: tp as f64 / (tp + fp) as f64,
                tp,
                fp,
            }
        })
        .collect();
    Ok(PrCurve { num_gt, points })
}

/// All-point interpolated average precision.
///
/// Each point's precision is replaced by the best precision at any equal or
/// higher recall, and the resulting step function is integrated over recall.
/// Recall only moves at true positives, in steps of `1 / num_gt`, so the
/// area is the sum of the envelope at those points divided by `num_gt`.
/// The sum is carried in double-double arithmetic so the result is the
/// correctly rounded value for curves of practical size.
pub fn average_precision(curve: &PrCurve) -> f64 {
    if curve.num_gt == 0 || curve.points.is_empty() {
        return 0.0;
    }
    // Envelope as exact fractions (tp, tp + fp), compared by cross-multiplying.
    let mut best: (u64, u64) = (0, 1);
    let mut suffix = Vec::with_capacity(curve.points.len());
    for point in curve.points.iter().rev() {
        let candidate = (point.tp, point.tp + point.fp);
        if (candidate.0 as u128) * (best.1 as u128) > (best.0 as u128) * (candidate.1 as u128) {
            best = candidate;
        }
        suffix.push(best);
    }
    suffix.reverse();
    let mut total = DoubleDouble::ZERO;
    let mut last_tp = 0;
    for (point, &(num, den)) in curve.points.iter().zip(&suffix) {
        if point.tp > last_tp {
            total = total.add(DoubleDouble::ratio(num, den));
            last_tp = point.tp;
        }
    }
    total.div(curve.num_gt).value().clamp(0.0, 1.0)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    fn normalized(a: f64, b: f64) -> Self {
        let hi = a + b;
        let lo = b - (hi - a);
        Self { hi, lo }
    }

    fn ratio(num: u64, den: u64) -> Self {
        let (a, b) = (num as f64, den as f64);
        let hi = a / b;
        let rem = (-hi).mul_add(b, a);
        Self::normalized(hi, rem / b)
    }

    fn add(self, other: Self) -> Self {
        let s = self.hi + other.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (other.hi - bb);
        Self::normalized(s, err + self.lo + other.lo)
    }

    fn div(self, den: u64) -> Self {
        let b = den as f64;
        let q1 = self.hi / b;
        let rem = (-q1).mul_add(b, self.hi) + self.lo;
        Self::normalized(q1, rem / b)
    }

    fn value(self) -> f64 {
        self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq1_eq2_substitution() {
        let c = pr_curve(&[true, false, true], 4).unwrap();
        let last = c.points[2];
        assert_eq!(last.precision, 2.0 / 3.0);
        assert_eq!(last.recall, 0.5);
    }

    #[test]
    fn three_point_curve() {
        let c = pr_curve(&[true, false, true], 2).unwrap();
        let pts: Vec<(f64, f64)> = c.points.iter().map(|p| (p.recall, p.precision)).collect();
        assert_eq!(pts, vec![(0.5, 1.0), (0.5, 0.5), (1.0, 2.0 / 3.0)]);
        assert_eq!(average_precision(&c), 5.0 / 6.0);
    }

    #[test]
    fn perfect_and_empty() {
        let c = pr_curve(&[true; 5], 5).unwrap();
        assert_eq!(average_precision(&c), 1.0);
        let c = pr_curve(&[], 3).unwrap();
        assert_eq!(average_precision(&c), 0.0);
        let c = pr_curve(&[false, false], 3).unwrap();
        assert_eq!(average_precision(&c), 0.0);
        assert!(matches!(pr_curve(&[true], 0), Err(EvalError::NoGroundTruth)));
    }

    #[test]
    fn partial_recall() {
        // 4 GT, ranking [FP, TP, TP]: envelope 2/3 at both TPs -> AP = 2 * (2/3) / 4 = 1/3
        let c = pr_curve(&[false, true, true], 4).unwrap();
        assert_eq!(average_precision(&c), 1.0 / 3.0);
    }

    #[test]
    fn recall_never_decreases() {
        let flags = [true, false, false, true, true, false, true];
        let c = pr_curve(&flags, 6).unwrap();
        for w in c.points.windows(2) {
            assert!(w[1].recall >= w[0].recall);
        }
    }
}
