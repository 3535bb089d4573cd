//! Per-query and aggregate reports.

use std::fmt::Write as _;

use num_traits::Float;
use serde::{Serialize, Serializer};

use crate::equivalence::verify_multipartite_identity;
use crate::error::Result;
use crate::group::QueryGroup;
use crate::metrics::{from_u64, MetricReport};
use crate::scalar::Score;

/// Rounds to 6 significant digits so serialized floats are stable.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

pub(crate) fn ser_float<F: Float, Ser: Serializer>(
    value: &F,
    s: Ser,
) -> std::result::Result<Ser::Ok, Ser::Error> {
    s.serialize_f64(round_sig6(value.to_f64().unwrap_or(f64::NAN)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryCheck {
    /// Every identity record for this query held.
    pub passed: bool,
    pub tie_afflicted: bool,
    /// `|DCG error - R|`; nonzero only with ties.
    pub identity_gap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "F: Float"))]
pub struct QueryReport<F> {
    pub query_id: String,
    #[serde(flatten)]
    pub metrics: MetricReport<F>,
    pub check: QueryCheck,
}

/// Tie-free queries are split into passed/failed; tied ones only counted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationSummary {
    pub passed: usize,
    pub failed: usize,
    pub tie_flagged: usize,
    pub max_tie_gap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "F: Float"))]
pub struct AggregateReport<F> {
    pub num_queries: usize,
    pub num_grades: u32,
    #[serde(serialize_with = "ser_float")]
    pub mean_ndcg_linear: F,
    #[serde(serialize_with = "ser_float")]
    pub mean_ndcg_classic: F,
    pub total_pairwise_loss: u64,
    pub total_dcg_error_linear: u64,
    pub degenerate_queries: usize,
    pub verification_summary: VerificationSummary,
    pub per_query: Vec<QueryReport<F>>,
}

impl<F: Float> AggregateReport<F> {
    /// Groups are reported sorted by query id. Degenerate queries count as
    /// 1.0 in both means.
    pub fn build<S: Score>(groups: &[QueryGroup<S>]) -> Result<Self> {
        let mut per_query = Vec::with_capacity(groups.len());
        let mut summary = VerificationSummary::default();
        for group in groups {
            let metrics = MetricReport::<F>::compute(group)?;
            let check = verify_multipartite_identity(group)?;
            let query_check = QueryCheck {
                passed: check.all_passed(),
                tie_afflicted: check.tie_afflicted(),
                identity_gap: check.identity.gap(),
            };
            if query_check.tie_afflicted {
                summary.tie_flagged += 1;
                summary.max_tie_gap = summary.max_tie_gap.max(query_check.identity_gap);
            } else if query_check.passed {
                summary.passed += 1;
            } else {
                summary.failed += 1;
            }
            per_query.push(QueryReport {
                query_id: group.query_id().to_string(),
                metrics,
                check: query_check,
            });
        }
        per_query.sort_by(|a, b| a.query_id.cmp(&b.query_id));

        let count = from_u64::<F>(per_query.len().max(1) as u64);
        let mean = |f: fn(&MetricReport<F>) -> F| {
            per_query
                .iter()
                .fold(F::zero(), |acc, q| acc + f(&q.metrics))
                / count
        };
        Ok(AggregateReport {
            num_queries: per_query.len(),
            num_grades: groups.first().map_or(0, QueryGroup::num_grades),
            mean_ndcg_linear: mean(|m| m.ndcg_linear),
            mean_ndcg_classic: mean(|m| m.ndcg_classic),
            total_pairwise_loss: per_query.iter().map(|q| q.metrics.pairwise_loss).sum(),
            total_dcg_error_linear: per_query.iter().map(|q| q.metrics.dcg_error_linear).sum(),
            degenerate_queries: per_query
                .iter()
                .filter(|q| q.metrics.degenerate_ndcg_linear || q.metrics.degenerate_ndcg_classic)
                .count(),
            verification_summary: summary,
            per_query,
        })
    }

    /// Column-aligned human-readable table.
    pub fn render_text(&self) -> String {
        let f = |x: F| format!("{:.6}", x.to_f64().unwrap_or(f64::NAN));
        let header = [
            "query",
            "items",
            "dcg_lin",
            "ideal_lin",
            "ndcg_lin",
            "dcg_err",
            "ndcg_cls",
            "loss",
            "z",
            "norm_loss",
            "flags",
        ];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for q in &self.per_query {
            let m = &q.metrics;
            let mut flags = Vec::new();
            if m.degenerate_ndcg_linear || m.degenerate_ndcg_classic {
                flags.push("degenerate");
            }
            if m.degenerate_pairs {
                flags.push("no-pairs");
            }
            if q.check.tie_afflicted {
                flags.push("ties");
            }
            if !q.check.passed && !q.check.tie_afflicted {
                flags.push("IDENTITY-FAILED");
            }
            rows.push(vec![
                q.query_id.clone(),
                m.num_items.to_string(),
                m.dcg_linear.to_string(),
                m.ideal_dcg_linear.to_string(),
                f(m.ndcg_linear),
                m.dcg_error_linear.to_string(),
                f(m.ndcg_classic),
                m.pairwise_loss.to_string(),
                m.normalizer_z.to_string(),
                f(m.normalized_pairwise_loss),
                if flags.is_empty() {
                    "-".to_string()
                } else {
                    flags.join(",")
                },
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();

        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    if c == 0 || c == row.len() - 1 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        let s = &self.verification_summary;
        let _ = writeln!(out);
        let _ = writeln!(out, "queries            {}", self.num_queries);
        let _ = writeln!(out, "grades (L)         {}", self.num_grades);
        let _ = writeln!(out, "mean ndcg linear   {}", f(self.mean_ndcg_linear));
        let _ = writeln!(out, "mean ndcg classic  {}", f(self.mean_ndcg_classic));
        let _ = writeln!(out, "total pair loss    {}", self.total_pairwise_loss);
        let _ = writeln!(out, "total dcg error    {}", self.total_dcg_error_linear);
        let _ = writeln!(out, "degenerate queries {}", self.degenerate_queries);
        let _ = writeln!(
            out,
            "identity checks    {} passed, {} failed, {} tie-flagged (max gap {})",
            s.passed, s.failed, s.tie_flagged, s.max_tie_gap
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_rounding() {
        assert_eq!(round_sig6(8.0 / 12.0), 0.666667);
        assert_eq!(round_sig6(1.0), 1.0);
        assert_eq!(round_sig6(0.0), 0.0);
        assert_eq!(round_sig6(123456789.0), 123457000.0);
        assert_eq!(round_sig6(-0.000123456789), -0.000123457);
    }

    #[test]
    fn aggregate_with_degenerate_query() {
        let good = QueryGroup::from_pairs("b", [(1, 0.9), (0, 0.1)], 2).unwrap();
        let flat = QueryGroup::from_pairs("a", [(0, 0.9), (0, 0.1)], 2).unwrap();
        let report = AggregateReport::<f64>::build(&[good, flat]).unwrap();
        assert_eq!(report.per_query[0].query_id, "a");
        assert!(report.per_query[0].metrics.degenerate_ndcg_linear);
        assert!(report.per_query[0].metrics.degenerate_ndcg_classic);
        assert_eq!(report.mean_ndcg_linear, 1.0);
        assert_eq!(report.degenerate_queries, 1);
        assert_eq!(report.verification_summary.passed, 2);
    }

    #[test]
    fn aggregate_counts_ties_separately() {
        let tied = QueryGroup::from_pairs("t", [(0, 0.5), (1, 0.5)], 2).unwrap();
        let report = AggregateReport::<f64>::build(&[tied]).unwrap();
        let s = &report.verification_summary;
        assert_eq!(
            (s.passed, s.failed, s.tie_flagged, s.max_tie_gap),
            (0, 0, 1, 1)
        );
        assert!(report.render_text().contains("ties"));
    }
}
