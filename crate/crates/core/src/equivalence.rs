//! Exact checks that the linear DCG error equals the weighted pairwise loss.
//!
//! Three routes are provided:
//!
//! * the exchange construction for bipartite rankings, where the DCG error
//!   is the sum of per-swap decrements `m + j_r - i_r`;
//! * the threshold split of a multipartite problem into `L - 1` bipartite
//!   ones, for both DCG and loss;
//! * exhaustive enumeration of every distinct arrangement of a small grade
//!   multiset.
//!
//! All comparisons are integer equalities. The identity assumes no two
//! items of different grade share a score; records for groups that violate
//! this are flagged `tie_afflicted` and exempt from hard assertions.

use std::fmt;

use serde::Serialize;

use crate::error::{RankError, Result};
use crate::group::{
    has_cross_grade_ties, ideal_sequence, rank_by_score, Grade, QueryGroup, RankedSequence,
};
use crate::metrics::{dcg_error_linear, dcg_linear};
use crate::pairwise::{binarize, pairwise_loss_fast};
use crate::scalar::Score;

/// Largest multiset the exhaustive oracle accepts (8! = 40320 orders).
pub const ORACLE_SIZE_LIMIT: usize = 8;

/// Swaps turning the ideal bipartite sequence `[1^m 0^n]` into an observed one.
///
/// Pair `(i, j)` swaps 1-based position `i` of the top block with 1-based
/// position `j` of the bottom block (absolute position `m + j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeSequence {
    pairs: Vec<(usize, usize)>,
    m: usize,
    n: usize,
}

impl ExchangeSequence {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of exchanges `k`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn ideal(&self) -> RankedSequence {
        RankedSequence::from_values(
            std::iter::repeat_n(1, self.m).chain(std::iter::repeat_n(0, self.n)),
        )
    }

    /// Applies every swap to the ideal sequence.
    pub fn replay(&self) -> RankedSequence {
        let mut grades = self.ideal().grades().to_vec();
        for &(i, j) in &self.pairs {
            grades.swap(i - 1, self.m + j - 1);
        }
        RankedSequence::new(grades)
    }
}

pub fn build_exchange_sequence(observed: &RankedSequence) -> Result<ExchangeSequence> {
    if let Some(g) = observed.grades().iter().find(|g| g.value() > 1) {
        return Err(RankError::NonBipartite(g.value()));
    }
    let m = observed.grades().iter().filter(|g| g.value() == 1).count();
    let n = observed.len() - m;
    let (top, bottom) = observed.grades().split_at(m);
    let misplaced_negatives = top
        .iter()
        .zip(1..)
        .filter(|(g, _)| g.value() == 0)
        .map(|(_, i)| i);
    let misplaced_positives: Vec<usize> = bottom
        .iter()
        .zip(1..)
        .filter(|(g, _)| g.value() == 1)
        .map(|(_, j)| j)
        .collect();
    let pairs: Vec<(usize, usize)> = misplaced_negatives
        .zip(misplaced_positives.iter().copied())
        .collect();
    // The top block has as many zeros as the bottom block has ones.
    assert_eq!(pairs.len(), misplaced_positives.len());
    Ok(ExchangeSequence { pairs, m, n })
}

/// `m + j_r - i_r` for each exchange; each is at least 1.
pub fn exchange_decrements(ex: &ExchangeSequence) -> Vec<u64> {
    ex.pairs
        .iter()
        .map(|&(i, j)| (ex.m + j - i) as u64)
        .collect()
}

/// Outcome of one exact identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
    pub instance_id: String,
    pub check_name: String,
    pub lhs: u64,
    pub rhs: u64,
    pub passed: bool,
    pub tie_afflicted: bool,
}

impl VerificationRecord {
    pub fn new(
        instance_id: impl Into<String>,
        check_name: impl Into<String>,
        lhs: u64,
        rhs: u64,
        tie_afflicted: bool,
    ) -> Self {
        VerificationRecord {
            instance_id: instance_id.into(),
            check_name: check_name.into(),
            lhs,
            rhs,
            passed: lhs == rhs,
            tie_afflicted,
        }
    }

    /// `|lhs - rhs|`.
    pub fn gap(&self) -> u64 {
        self.lhs.abs_diff(self.rhs)
    }

    /// Failed on an instance where the identity is required to hold.
    pub fn is_hard_failure(&self) -> bool {
        !self.passed && !self.tie_afflicted
    }
}

impl fmt::Display for VerificationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} vs {} {}",
            self.instance_id,
            self.check_name,
            self.lhs,
            self.rhs,
            if self.passed { "ok" } else { "MISMATCH" }
        )?;
        if self.tie_afflicted {
            f.write_str(" (ties)")?;
        }
        Ok(())
    }
}

pub const CHECK_BIPARTITE: &str = "bipartite_dcg_error_eq_loss";
pub const CHECK_MULTIPARTITE: &str = "dcg_error_eq_weighted_loss";
pub const CHECK_DCG_SPLIT: &str = "dcg_eq_threshold_sum";
pub const CHECK_ORACLE: &str = "oracle_dcg_error_eq_loss";

fn ensure_bipartite<S>(group: &QueryGroup<S>) -> Result<()> {
    match group.grades().find(|g| g.value() > 1) {
        Some(g) => Err(RankError::NonBipartite(g.value())),
        None => Ok(()),
    }
}

/// Checks `DCG error = R` on a group whose grades are all 0 or 1.
pub fn verify_bipartite_identity<S: Score>(group: &QueryGroup<S>) -> Result<VerificationRecord> {
    ensure_bipartite(group)?;
    let lhs = dcg_error_linear(group)?;
    let rhs = pairwise_loss_fast::<f64, S>(group)?.unnormalized;
    Ok(VerificationRecord::new(
        group.query_id(),
        CHECK_BIPARTITE,
        lhs,
        rhs,
        has_cross_grade_ties(group),
    ))
}

/// The weighted identity plus the per-threshold bipartite identities and
/// the split of the observed DCG into per-threshold DCGs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultipartiteVerification {
    pub identity: VerificationRecord,
    pub thresholds: Vec<VerificationRecord>,
    pub dcg_split: VerificationRecord,
}

impl MultipartiteVerification {
    pub fn records(&self) -> impl Iterator<Item = &VerificationRecord> {
        std::iter::once(&self.identity)
            .chain(&self.thresholds)
            .chain(std::iter::once(&self.dcg_split))
    }

    pub fn all_passed(&self) -> bool {
        self.records().all(|r| r.passed)
    }

    pub fn tie_afflicted(&self) -> bool {
        self.identity.tie_afflicted
    }

    pub fn has_hard_failure(&self) -> bool {
        self.records().any(VerificationRecord::is_hard_failure)
    }
}

pub fn verify_multipartite_identity<S: Score>(
    group: &QueryGroup<S>,
) -> Result<MultipartiteVerification> {
    let lhs = dcg_error_linear(group)?;
    let rhs = pairwise_loss_fast::<f64, S>(group)?.unnormalized;
    let ties = has_cross_grade_ties(group);
    let identity = VerificationRecord::new(group.query_id(), CHECK_MULTIPARTITE, lhs, rhs, ties);

    let thresholds = (0..group.num_grades() - 1)
        .map(|k| {
            let mut record = verify_bipartite_identity(&binarize(group, k)?)?;
            record.check_name = format!("{CHECK_BIPARTITE}@k{k}");
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;

    // The split is a property of the sequence alone, so it holds with ties too.
    let ranked = rank_by_score(group)?;
    let split_sum = (0..group.num_grades() - 1)
        .map(|k| dcg_linear(&ranked.binarize(k)))
        .sum::<Result<u64>>()?;
    let dcg_split = VerificationRecord::new(
        group.query_id(),
        CHECK_DCG_SPLIT,
        dcg_linear(&ranked)?,
        split_sum,
        false,
    );

    Ok(MultipartiteVerification {
        identity,
        thresholds,
        dcg_split,
    })
}

/// Rearranges `values` into the next lexicographically larger order.
/// Returns `false` (leaving `values` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(values: &mut [T]) -> bool {
    let Some(pivot) = values.windows(2).rposition(|w| w[0] < w[1]) else {
        values.reverse();
        return false;
    };
    let successor = values
        .iter()
        .rposition(|v| *v > values[pivot])
        .expect("a larger element exists right of the pivot");
    values.swap(pivot, successor);
    values[pivot + 1..].reverse();
    true
}

/// Every distinct ordering of a multiset, in lexicographic order.
pub fn distinct_permutations(values: &[u32]) -> Vec<Vec<u32>> {
    let mut current = values.to_vec();
    current.sort_unstable();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

/// All multisets of `size` grades drawn from `0..num_grades`, each listed in
/// non-increasing order.
pub fn grade_multisets(size: usize, num_grades: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, remaining: usize, ceiling: u32, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for g in (0..=ceiling).rev() {
            prefix.push(g);
            extend(prefix, remaining - 1, g, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if num_grades == 0 {
        return out;
    }
    extend(
        &mut Vec::with_capacity(size),
        size,
        num_grades - 1,
        &mut out,
    );
    out
}

/// Weighted misranked-pair count read straight off a rank order: position
/// `p` above `q` with a lower grade costs the grade gap.
fn sequence_pair_loss(order: &[Grade]) -> u64 {
    let mut loss = 0;
    for (p, above) in order.iter().enumerate() {
        for below in &order[p + 1..] {
            if above < below {
                loss += u64::from(below.value() - above.value());
            }
        }
    }
    loss
}

/// Checks the identity on every distinct arrangement of `grades`.
pub fn brute_force_oracle(grades: &[u32], max_size: usize) -> Result<Vec<VerificationRecord>> {
    let limit = max_size.min(ORACLE_SIZE_LIMIT);
    if grades.len() > limit {
        return Err(RankError::TooLarge {
            size: grades.len(),
            limit,
        });
    }
    if grades.is_empty() {
        return Err(RankError::EmptyGroup);
    }
    let num_grades = grades.iter().copied().max().unwrap_or(0).max(1) + 1;
    let ideal = {
        let group =
            QueryGroup::from_pairs("oracle", grades.iter().map(|&g| (g, 0i64)), num_grades)?;
        dcg_linear(&ideal_sequence(&group)?)?
    };
    distinct_permutations(grades)
        .into_iter()
        .map(|perm| {
            let seq = RankedSequence::from_values(perm);
            let dcg_error = ideal - dcg_linear(&seq)?;
            let loss = sequence_pair_loss(seq.grades());
            Ok(VerificationRecord::new(
                seq.to_string(),
                CHECK_ORACLE,
                dcg_error,
                loss,
                false,
            ))
        })
        .collect()
}
