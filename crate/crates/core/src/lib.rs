//! Ranking metrics built around the linear DCG, where the item at 1-based
//! position `i` of an `|S|`-item list is discounted by `|S| - i`.
//!
//! Under that discount the DCG error of a ranking (ideal DCG minus observed
//! DCG) equals the number of misranked pairs weighted by grade gap. The
//! [`equivalence`] module checks this exactly, and [`pairwise`] provides an
//! `O(|S| L)` counter for the loss alongside the quadratic reference.
//!
//! Everything that orders items is generic over the [`Score`] type: `f32`,
//! `f64`, integers, or [`BigRational`] for exact decimal input. Float
//! outputs (NDCG ratios, classical DCG) are generic over
//! [`num_traits::Float`].
//!
//! ```
//! use linear_ndcg::{dcg_error_linear, pairwise_loss_fast, Group};
//!
//! let group = Group::from_pairs(
//!     "q1",
//!     [(1, 0.9), (0, 0.8), (0, 0.7), (1, 0.6), (1, 0.5), (0, 0.4)],
//!     2,
//! )
//! .unwrap();
//! assert_eq!(dcg_error_linear(&group).unwrap(), 4);
//! assert_eq!(pairwise_loss_fast::<f64, _>(&group).unwrap().unnormalized, 4);
//! ```

pub mod equivalence;
pub mod error;
pub mod group;
pub mod io;
pub mod metrics;
pub mod pairwise;
pub mod report;
pub mod scalar;
pub mod verify;

pub use num_rational::BigRational;

pub use equivalence::{
    brute_force_oracle, build_exchange_sequence, exchange_decrements, verify_bipartite_identity,
    verify_multipartite_identity, ExchangeSequence, MultipartiteVerification, VerificationRecord,
};
pub use error::{RankError, Result};
pub use group::{ideal_sequence, rank_by_score, Grade, QueryGroup, RankedSequence, RatedItem};
pub use metrics::{
    bipartite_ideal_dcg, dcg_classic, dcg_error_linear, dcg_linear, ideal_dcg_linear, ndcg_classic,
    ndcg_linear, MetricReport, Ndcg,
};
pub use pairwise::{
    binarize, pairwise_loss_fast, pairwise_loss_naive, threshold_decomposition, PairwiseLoss,
    ThresholdLossVector,
};
pub use report::AggregateReport;
pub use scalar::Score;

/// Group with `f64` scores.
pub type Group = QueryGroup<f64>;
/// Group with `f32` scores.
pub type GroupF32 = QueryGroup<f32>;
/// Group whose scores compare exactly as written in decimal.
pub type ExactGroup = QueryGroup<BigRational>;
/// Report with `f64` ratios.
pub type Report = MetricReport<f64>;
/// Aggregate with `f64` ratios.
pub type Aggregate = AggregateReport<f64>;
