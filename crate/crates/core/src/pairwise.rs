//! Weighted multipartite pairwise loss.
//!
//! For grades `a < b`, every pair where the grade-`b` item scores strictly
//! below the grade-`a` item costs `b - a`. Equal scores cost nothing.

use std::cmp::Ordering;

use num_traits::Float;

use crate::error::{RankError, Result};
use crate::group::{cmp_scores, score_order, Grade, QueryGroup};
use crate::metrics::from_u64;
use crate::scalar::Score;

/// Unnormalized loss `R`, the pair count `Z`, and `R / Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseLoss<F> {
    pub unnormalized: u64,
    /// `sum_{a<b} |S_a| |S_b|`, without the grade-gap weights.
    pub normalizer_z: u64,
    /// Zero when `normalizer_z` is zero.
    pub normalized: F,
    /// All items share one grade.
    pub degenerate: bool,
}

/// Per-threshold unweighted losses `R_k`, `k` in `0..L-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdLossVector {
    pub per_threshold: Vec<u64>,
}

impl ThresholdLossVector {
    pub fn total(&self) -> u64 {
        self.per_threshold.iter().sum()
    }
}

/// Count of cross-grade pairs.
pub fn normalizer_z<S>(group: &QueryGroup<S>) -> u64 {
    let hist = group.grade_histogram();
    let total: u64 = hist.iter().sum();
    let same: u64 = hist.iter().map(|c| c * c).sum();
    (total * total - same) / 2
}

fn finish<F: Float, S>(group: &QueryGroup<S>, unnormalized: u64) -> PairwiseLoss<F> {
    let z = normalizer_z(group);
    PairwiseLoss {
        unnormalized,
        normalizer_z: z,
        normalized: if z == 0 {
            F::zero()
        } else {
            from_u64::<F>(unnormalized) / from_u64::<F>(z)
        },
        degenerate: z == 0,
    }
}

/// Direct double loop over all item pairs. Quadratic; kept as the reference.
pub fn pairwise_loss_naive<F: Float, S: Score>(group: &QueryGroup<S>) -> Result<PairwiseLoss<F>> {
    group.non_empty()?;
    let items = group.items();
    let mut loss = 0u64;
    for (i, hi) in items.iter().enumerate() {
        for lo in &items[i + 1..] {
            let (better, worse) = match hi.grade.cmp(&lo.grade) {
                Ordering::Greater => (hi, lo),
                Ordering::Less => (lo, hi),
                Ordering::Equal => continue,
            };
            if better.score < worse.score {
                loss += u64::from(better.grade.value() - worse.grade.value());
            }
        }
    }
    Ok(finish(group, loss))
}

/// Sweep in descending score with a histogram of already-passed grades.
///
/// Items sharing a score are handled as one batch and only enter the
/// histogram after the whole batch is charged, so ties never count.
/// Runs in `O(|S| log |S| + |S| L)`.
pub fn pairwise_loss_fast<F: Float, S: Score>(group: &QueryGroup<S>) -> Result<PairwiseLoss<F>> {
    group.non_empty()?;
    let items = group.items();
    let order = score_order(group);
    let mut seen = vec![0u64; group.num_grades() as usize];
    let mut loss = 0u64;

    let mut start = 0;
    while start < order.len() {
        let head = &items[order[start]].score;
        let mut end = start + 1;
        while end < order.len() && cmp_scores(&items[order[end]].score, head) == Ordering::Equal {
            end += 1;
        }
        for &i in &order[start..end] {
            let g = items[i].grade.value() as usize;
            for (lower, &count) in seen[..g].iter().enumerate() {
                loss += count * (g - lower) as u64;
            }
        }
        for &i in &order[start..end] {
            seen[items[i].grade.value() as usize] += 1;
        }
        start = end;
    }
    Ok(finish(group, loss))
}

/// Grade 1 where the grade exceeds `threshold`, else 0; `L` becomes 2.
pub fn binarize<S: Score>(group: &QueryGroup<S>, threshold: u32) -> Result<QueryGroup<S>> {
    let max = group.num_grades() - 2;
    if threshold > max {
        return Err(RankError::ThresholdOutOfRange { threshold, max });
    }
    Ok(group.with_grades(2, |g| Grade::new(u32::from(g.value() > threshold))))
}

/// `R_k` for every threshold `k`: the bipartite loss after binarizing at `k`.
pub fn threshold_decomposition<S: Score>(group: &QueryGroup<S>) -> Result<ThresholdLossVector> {
    group.non_empty()?;
    let per_threshold = (0..group.num_grades() - 1)
        .map(|k| {
            let binary = binarize(group, k)?;
            Ok(pairwise_loss_fast::<f64, S>(&binary)?.unnormalized)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdLossVector { per_threshold })
}
