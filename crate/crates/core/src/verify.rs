//! Batch verification over exhaustive and seeded random instances.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::equivalence::{
    brute_force_oracle, build_exchange_sequence, exchange_decrements, grade_multisets,
    verify_multipartite_identity, VerificationRecord, ORACLE_SIZE_LIMIT,
};
use crate::error::Result;
use crate::group::{ideal_sequence, rank_by_score, QueryGroup};
use crate::metrics::{dcg_linear, ndcg_linear};
use crate::pairwise::{pairwise_loss_fast, pairwise_loss_naive, threshold_decomposition};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("max-grades must be at least 2, got {0}")]
    TooFewGrades(u32),
    #[error("max-items must be at least 1 when trials > 0")]
    NoItems,
    #[error("exhaustive-limit must be at most {ORACLE_SIZE_LIMIT}, got {0}")]
    ExhaustiveTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub max_items: usize,
    pub max_grades: u32,
    pub seed: u64,
    pub exhaustive_limit: usize,
}

impl VerifyConfig {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if self.max_grades < 2 {
            return Err(ConfigError::TooFewGrades(self.max_grades));
        }
        if self.trials > 0 && self.max_items == 0 {
            return Err(ConfigError::NoItems);
        }
        if self.exhaustive_limit > ORACLE_SIZE_LIMIT {
            return Err(ConfigError::ExhaustiveTooLarge(self.exhaustive_limit));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub multisets: usize,
    pub arrangements: usize,
    pub random_groups: usize,
    pub random_items: usize,
    pub checks: BTreeMap<String, Tally>,
    /// First few failing records, for diagnostics.
    pub failures: Vec<VerificationRecord>,
}

const KEPT_FAILURES: usize = 20;

impl VerifySummary {
    pub fn total_failures(&self) -> usize {
        self.checks.values().map(|t| t.failed).sum()
    }

    pub fn total_passed(&self) -> usize {
        self.checks.values().map(|t| t.passed).sum()
    }

    fn record(&mut self, rec: VerificationRecord) {
        // Random instances are tie-free, so every record is a hard check.
        let base = rec
            .check_name
            .split('@')
            .next()
            .unwrap_or(&rec.check_name)
            .to_string();
        let tally = self.checks.entry(base).or_default();
        if rec.passed {
            tally.passed += 1;
        } else {
            tally.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(rec);
            }
        }
    }

    fn check(&mut self, instance: &str, name: &str, lhs: u64, rhs: u64) {
        self.record(VerificationRecord::new(instance, name, lhs, rhs, false));
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "exhaustive: {} multisets, {} arrangements",
            self.multisets, self.arrangements
        )?;
        writeln!(
            f,
            "random: {} groups, {} items",
            self.random_groups, self.random_items
        )?;
        for (name, t) in &self.checks {
            writeln!(f, "check {name}: {} passed, {} failed", t.passed, t.failed)?;
        }
        for rec in &self.failures {
            writeln!(f, "failure {rec}")?;
        }
        let failures = self.total_failures();
        if failures == 0 {
            writeln!(f, "result: PASS ({} checks)", self.total_passed())
        } else {
            writeln!(f, "result: FAIL ({failures} failures)")
        }
    }
}

/// Random group with grades uniform in `0..num_grades` and pairwise
/// distinct scores in `[0, 1)`.
pub fn random_tie_free_group<R: Rng>(
    rng: &mut R,
    id: String,
    len: usize,
    num_grades: u32,
) -> QueryGroup<f64> {
    let mut seen = HashSet::with_capacity(len);
    let mut pairs = Vec::with_capacity(len);
    while pairs.len() < len {
        let score: f64 = rng.random();
        if seen.insert(score.to_bits()) {
            pairs.push((rng.random_range(0..num_grades), score));
        }
    }
    QueryGroup::from_pairs(id, pairs, num_grades).expect("generated grades and scores are valid")
}

pub fn run(config: &VerifyConfig) -> std::result::Result<VerifySummary, ConfigError> {
    config.validate()?;
    let mut summary = VerifySummary::default();
    run_exhaustive(config, &mut summary).expect("oracle inputs respect the size limit");

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for trial in 0..config.trials {
        let len = rng.random_range(1..=config.max_items);
        let num_grades = rng.random_range(2..=config.max_grades);
        let group = random_tie_free_group(&mut rng, format!("trial{trial}"), len, num_grades);
        check_group(&group, &mut summary).expect("generated groups are non-empty");
        summary.random_groups += 1;
        summary.random_items += len;
    }
    Ok(summary)
}

fn run_exhaustive(config: &VerifyConfig, summary: &mut VerifySummary) -> Result<()> {
    for size in 1..=config.exhaustive_limit {
        for multiset in grade_multisets(size, config.max_grades) {
            for rec in brute_force_oracle(&multiset, ORACLE_SIZE_LIMIT)? {
                summary.arrangements += 1;
                summary.record(rec);
            }
            summary.multisets += 1;
        }
    }
    Ok(())
}

/// Every exact identity on one tie-free group.
pub fn check_group(group: &QueryGroup<f64>, summary: &mut VerifySummary) -> Result<()> {
    let id = group.query_id();
    let verification = verify_multipartite_identity(group)?;
    for rec in verification.records() {
        summary.record(rec.clone());
    }

    let naive = pairwise_loss_naive::<f64, _>(group)?;
    let fast = pairwise_loss_fast::<f64, _>(group)?;
    summary.check(id, "fast_eq_naive", fast.unnormalized, naive.unnormalized);

    let decomposition = threshold_decomposition(group)?;
    summary.check(
        id,
        "threshold_sum_eq_loss",
        decomposition.total(),
        naive.unnormalized,
    );

    let ranked = rank_by_score(group)?;
    for k in 0..group.num_grades() - 1 {
        let binary = ranked.binarize(k);
        let exchanges = build_exchange_sequence(&binary)?;
        let ideal = dcg_linear(&exchanges.ideal())?;
        let decrement_sum: u64 = exchange_decrements(&exchanges).iter().sum();
        summary.check(
            id,
            "exchange_decrements_eq_dcg_error",
            decrement_sum,
            ideal - dcg_linear(&binary)?,
        );
        summary.check(
            id,
            "exchange_replay",
            u64::from(exchanges.replay() == binary),
            1,
        );
    }

    // ndcg = 1 - err / ideal, cross-multiplied over the integers.
    let ideal = dcg_linear(&ideal_sequence(group)?)?;
    let observed = dcg_linear(&ranked)?;
    let ndcg = ndcg_linear::<f64, _>(group)?;
    if ideal > 0 {
        let err = ideal - observed;
        summary.check(id, "ndcg_identity", observed * ideal, (ideal - err) * ideal);
        summary.check(
            id,
            "ndcg_ratio",
            ndcg.value.to_bits(),
            (observed as f64 / ideal as f64).to_bits(),
        );
    }
    Ok(())
}
