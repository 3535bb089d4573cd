//! Linear and classical DCG/NDCG.
//!
//! The linear family weights grade `r_i` at 1-based position `i` by
//! `|S| - i`, so the last position earns nothing:
//!
//! ```text
//! DCG_lin(g) = sum_i r_i * (|S| - i)
//! ```
//!
//! All linear quantities are exact `u64`; only the NDCG ratio is a float.
//! The classical family uses gain `2^r - 1` and discount `1 / log2(i + 1)`.

use num_traits::Float;
use serde::Serialize;

use crate::error::{RankError, Result};
use crate::group::{
    has_cross_grade_ties, ideal_sequence, rank_by_score, QueryGroup, RankedSequence,
};
use crate::pairwise::pairwise_loss_fast;
use crate::report::ser_float;
use crate::scalar::Score;

/// Largest grade accepted by the exponential gain; keeps `2^r` exact.
pub const MAX_CLASSIC_GRADE: u32 = 30;

/// An NDCG value plus whether the ideal DCG was zero.
///
/// A group whose grades are all zero has no relevant item; every ranking of
/// it is ideal, so the value is reported as exactly 1 with `degenerate` set.
/// The linear family is also degenerate for a single item, since the last
/// position earns nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ndcg<F> {
    pub value: F,
    pub degenerate: bool,
}

pub fn dcg_linear(seq: &RankedSequence) -> Result<u64> {
    if seq.is_empty() {
        return Err(RankError::EmptyGroup);
    }
    let len = seq.len() as u64;
    Ok(seq
        .grades()
        .iter()
        .zip(1u64..)
        .map(|(g, pos)| u64::from(g.value()) * (len - pos))
        .sum())
}

pub fn ideal_dcg_linear<S>(group: &QueryGroup<S>) -> Result<u64> {
    dcg_linear(&ideal_sequence(group)?)
}

/// Closed form of the ideal linear DCG for `m` positives and `n` negatives:
/// `m*n + m*(m-1)/2`.
pub fn bipartite_ideal_dcg(m: u64, n: u64) -> u64 {
    m * n + m * m.saturating_sub(1) / 2
}

pub fn dcg_error_linear<S: Score>(group: &QueryGroup<S>) -> Result<u64> {
    let ideal = ideal_dcg_linear(group)?;
    let observed = dcg_linear(&rank_by_score(group)?)?;
    Ok(ideal - observed)
}

pub fn ndcg_linear<F: Float, S: Score>(group: &QueryGroup<S>) -> Result<Ndcg<F>> {
    let ideal = ideal_dcg_linear(group)?;
    let observed = dcg_linear(&rank_by_score(group)?)?;
    Ok(ratio(observed, ideal))
}

fn ratio<F: Float>(observed: u64, ideal: u64) -> Ndcg<F> {
    if ideal == 0 {
        return Ndcg {
            value: F::one(),
            degenerate: true,
        };
    }
    Ndcg {
        value: from_u64::<F>(observed) / from_u64::<F>(ideal),
        degenerate: false,
    }
}

pub(crate) fn from_u64<F: Float>(v: u64) -> F {
    F::from(v).expect("every u64 is representable (possibly rounded) in a float")
}

pub fn dcg_classic<F: Float>(seq: &RankedSequence) -> Result<F> {
    if seq.is_empty() {
        return Err(RankError::EmptyGroup);
    }
    let mut total = F::zero();
    for (g, pos) in seq.grades().iter().zip(1u64..) {
        let r = g.value();
        if r > MAX_CLASSIC_GRADE {
            return Err(RankError::GradeTooLarge(r));
        }
        if r == 0 {
            continue;
        }
        let gain = from_u64::<F>((1u64 << r) - 1);
        total = total + gain / from_u64::<F>(pos + 1).log2();
    }
    Ok(total)
}

pub fn ndcg_classic<F: Float, S: Score>(group: &QueryGroup<S>) -> Result<Ndcg<F>> {
    let ideal: F = dcg_classic(&ideal_sequence(group)?)?;
    let observed: F = dcg_classic(&rank_by_score(group)?)?;
    if ideal == F::zero() {
        return Ok(Ndcg {
            value: F::one(),
            degenerate: true,
        });
    }
    Ok(Ndcg {
        value: observed / ideal,
        degenerate: false,
    })
}

/// Every metric computed for one query group.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "F: Float"))]
pub struct MetricReport<F> {
    pub num_items: usize,
    pub num_grades: u32,
    pub dcg_linear: u64,
    pub ideal_dcg_linear: u64,
    #[serde(serialize_with = "ser_float")]
    pub ndcg_linear: F,
    pub dcg_error_linear: u64,
    #[serde(serialize_with = "ser_float")]
    pub dcg_classic: F,
    #[serde(serialize_with = "ser_float")]
    pub ideal_dcg_classic: F,
    #[serde(serialize_with = "ser_float")]
    pub ndcg_classic: F,
    pub pairwise_loss: u64,
    pub normalizer_z: u64,
    /// `pairwise_loss / normalizer_z`. The numerator carries grade-gap
    /// weights and the denominator does not, so this can exceed 1 when
    /// `L > 2`.
    #[serde(serialize_with = "ser_float")]
    pub normalized_pairwise_loss: F,
    /// Ideal linear DCG is zero (all grades 0, or a single item);
    /// `ndcg_linear` is reported as 1.
    pub degenerate_ndcg_linear: bool,
    /// Ideal classical DCG is zero (all grades 0); `ndcg_classic` is 1.
    pub degenerate_ndcg_classic: bool,
    /// Every item shares one grade, so there are no cross-grade pairs.
    pub degenerate_pairs: bool,
    /// Two items of different grade share a score.
    pub tie_afflicted: bool,
}

impl<F: Float> MetricReport<F> {
    pub fn compute<S: Score>(group: &QueryGroup<S>) -> Result<Self> {
        let ranked = rank_by_score(group)?;
        let ideal = ideal_sequence(group)?;

        let dcg = dcg_linear(&ranked)?;
        let ideal_dcg = dcg_linear(&ideal)?;
        let linear = ratio::<F>(dcg, ideal_dcg);

        let dcg_c: F = dcg_classic(&ranked)?;
        let ideal_c: F = dcg_classic(&ideal)?;
        let classic = if ideal_c == F::zero() {
            F::one()
        } else {
            dcg_c / ideal_c
        };

        let loss = pairwise_loss_fast::<F, S>(group)?;

        Ok(MetricReport {
            num_items: group.len(),
            num_grades: group.num_grades(),
            dcg_linear: dcg,
            ideal_dcg_linear: ideal_dcg,
            ndcg_linear: linear.value,
            dcg_error_linear: ideal_dcg - dcg,
            dcg_classic: dcg_c,
            ideal_dcg_classic: ideal_c,
            ndcg_classic: classic,
            pairwise_loss: loss.unnormalized,
            normalizer_z: loss.normalizer_z,
            normalized_pairwise_loss: loss.normalized,
            degenerate_ndcg_linear: linear.degenerate,
            degenerate_ndcg_classic: ideal_c == F::zero(),
            degenerate_pairs: loss.degenerate,
            tie_afflicted: has_cross_grade_ties(group),
        })
    }
}
