//! Domain types: grades, scored items, query groups and ranked sequences.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{RankError, Result};
use crate::scalar::Score;

/// Integer relevance rating in `0..L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Grade(u32);

impl Grade {
    pub const fn new(value: u32) -> Self {
        Grade(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }
}

impl From<u32> for Grade {
    fn from(value: u32) -> Self {
        Grade(value)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One instance: its grade and the model score `f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatedItem<S> {
    pub grade: Grade,
    pub score: S,
}

impl<S> RatedItem<S> {
    pub fn new(grade: impl Into<Grade>, score: S) -> Self {
        RatedItem {
            grade: grade.into(),
            score,
        }
    }
}

/// All items of one query together with the size `L` of the grade alphabet.
///
/// Items keep their input order; that order is the tie-break for equal
/// scores. Construction validates grades against `L` and rejects
/// non-finite scores, so every accessor downstream can rely on a total
/// order over scores.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryGroup<S> {
    query_id: String,
    items: Vec<RatedItem<S>>,
    num_grades: u32,
}

impl<S: Score> QueryGroup<S> {
    pub fn new(
        query_id: impl Into<String>,
        items: Vec<RatedItem<S>>,
        num_grades: u32,
    ) -> Result<Self> {
        if num_grades < 2 {
            return Err(RankError::TooFewGrades(num_grades));
        }
        for (index, item) in items.iter().enumerate() {
            if item.grade.value() >= num_grades {
                return Err(RankError::GradeOutOfRange {
                    grade: item.grade.value(),
                    num_grades,
                });
            }
            if !item.score.is_finite_score() {
                return Err(RankError::InvalidScore { index });
            }
        }
        Ok(QueryGroup {
            query_id: query_id.into(),
            items,
            num_grades,
        })
    }

    /// Builds a group from parallel `(grade, score)` pairs.
    pub fn from_pairs(
        query_id: impl Into<String>,
        pairs: impl IntoIterator<Item = (u32, S)>,
        num_grades: u32,
    ) -> Result<Self> {
        let items = pairs
            .into_iter()
            .map(|(g, s)| RatedItem::new(g, s))
            .collect();
        Self::new(query_id, items, num_grades)
    }
}

impl<S> QueryGroup<S> {
    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn items(&self) -> &[RatedItem<S>] {
        &self.items
    }

    pub fn num_grades(&self) -> u32 {
        self.num_grades
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn grades(&self) -> impl Iterator<Item = Grade> + '_ {
        self.items.iter().map(|item| item.grade)
    }

    /// `|S_a|` for every grade `a` in `0..L`.
    pub fn grade_histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.num_grades as usize];
        for grade in self.grades() {
            hist[grade.value() as usize] += 1;
        }
        hist
    }

    pub(crate) fn non_empty(&self) -> Result<()> {
        if self.items.is_empty() {
            Err(RankError::EmptyGroup)
        } else {
            Ok(())
        }
    }

    /// Same scores, new grades; used by threshold binarization.
    pub(crate) fn with_grades(&self, num_grades: u32, map: impl Fn(Grade) -> Grade) -> Self
    where
        S: Clone,
    {
        QueryGroup {
            query_id: self.query_id.clone(),
            items: self
                .items
                .iter()
                .map(|item| RatedItem::new(map(item.grade), item.score.clone()))
                .collect(),
            num_grades,
        }
    }
}

/// Grades listed in rank order; position 1 is the best-scored item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankedSequence {
    grades: Vec<Grade>,
}

impl RankedSequence {
    pub fn new(grades: Vec<Grade>) -> Self {
        RankedSequence { grades }
    }

    pub fn from_values(values: impl IntoIterator<Item = u32>) -> Self {
        RankedSequence {
            grades: values.into_iter().map(Grade::new).collect(),
        }
    }

    pub fn grades(&self) -> &[Grade] {
        &self.grades
    }

    pub fn values(&self) -> Vec<u32> {
        self.grades.iter().map(|g| g.value()).collect()
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn max_grade(&self) -> Option<Grade> {
        self.grades.iter().copied().max()
    }

    /// Grade 1 where the original grade exceeds `threshold`, else 0.
    pub fn binarize(&self, threshold: u32) -> RankedSequence {
        RankedSequence {
            grades: self
                .grades
                .iter()
                .map(|g| Grade::new(u32::from(g.value() > threshold)))
                .collect(),
        }
    }
}

impl fmt::Display for RankedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, g) in self.grades.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("]")
    }
}

/// Scores are validated finite at construction, so this is a total order.
pub(crate) fn cmp_scores<S: PartialOrd>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Item indices in descending score order, ties by ascending input index.
pub(crate) fn score_order<S: Score>(group: &QueryGroup<S>) -> Vec<usize> {
    let items = group.items();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| cmp_scores(&items[b].score, &items[a].score));
    order
}

/// The ranking `g` induced by the scores: descending score, stable on ties.
pub fn rank_by_score<S: Score>(group: &QueryGroup<S>) -> Result<RankedSequence> {
    group.non_empty()?;
    let items = group.items();
    Ok(RankedSequence {
        grades: score_order(group)
            .into_iter()
            .map(|i| items[i].grade)
            .collect(),
    })
}

/// The ideal permutation: grades in non-increasing order.
pub fn ideal_sequence<S>(group: &QueryGroup<S>) -> Result<RankedSequence> {
    group.non_empty()?;
    let mut grades: Vec<Grade> = group.grades().collect();
    grades.sort_unstable_by(|a, b| b.cmp(a));
    Ok(RankedSequence { grades })
}

/// `true` when two items of different grade share a score.
///
/// Same-grade ties are harmless: they change neither the linear DCG nor the
/// pairwise loss.
pub fn has_cross_grade_ties<S: Score>(group: &QueryGroup<S>) -> bool {
    let items = group.items();
    let order = score_order(group);
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && cmp_scores(&items[order[end]].score, &items[order[start]].score) == Ordering::Equal
        {
            end += 1;
        }
        let first = items[order[start]].grade;
        if order[start..end].iter().any(|&i| items[i].grade != first) {
            return true;
        }
        start = end;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(grades: &[u32], scores: &[f64], num_grades: u32) -> QueryGroup<f64> {
        QueryGroup::from_pairs(
            "q",
            grades.iter().copied().zip(scores.iter().copied()),
            num_grades,
        )
        .unwrap()
    }

    #[test]
    fn rank_by_descending_score() {
        let g = group(&[1, 0, 1], &[0.9, 0.1, 0.5], 2);
        assert_eq!(rank_by_score(&g).unwrap().values(), vec![1, 1, 0]);
    }

    #[test]
    fn rank_single_item() {
        let g = group(&[1], &[-4.0], 2);
        assert_eq!(rank_by_score(&g).unwrap().values(), vec![1]);
    }

    #[test]
    fn rank_ties_are_stable() {
        let g = group(&[0, 1], &[0.5, 0.5], 2);
        assert_eq!(rank_by_score(&g).unwrap().values(), vec![0, 1]);
    }

    #[test]
    fn ideal_is_descending() {
        let g = group(&[1, 0, 0, 1, 1, 0], &[0.0; 6], 2);
        assert_eq!(ideal_sequence(&g).unwrap().values(), vec![1, 1, 1, 0, 0, 0]);
        let g = group(&[2, 1, 1, 0, 0, 0, 0], &[0.0; 7], 3);
        assert_eq!(
            ideal_sequence(&g).unwrap().values(),
            vec![2, 1, 1, 0, 0, 0, 0]
        );
        let g = group(&[1, 1, 1], &[3.0, 2.0, 1.0], 2);
        assert_eq!(ideal_sequence(&g).unwrap().values(), vec![1, 1, 1]);
    }

    #[test]
    fn empty_group_errors() {
        let g = group(&[], &[], 2);
        assert_eq!(rank_by_score(&g), Err(RankError::EmptyGroup));
        assert_eq!(ideal_sequence(&g), Err(RankError::EmptyGroup));
    }

    #[test]
    fn construction_validates() {
        let err = QueryGroup::from_pairs("q", [(0, 1.0), (1, f64::NAN)], 2).unwrap_err();
        assert_eq!(err, RankError::InvalidScore { index: 1 });
        let err = QueryGroup::from_pairs("q", [(0, 1.0), (1, f64::NEG_INFINITY)], 2).unwrap_err();
        assert_eq!(err, RankError::InvalidScore { index: 1 });
        let err = QueryGroup::from_pairs("q", [(2, 1.0)], 2).unwrap_err();
        assert_eq!(
            err,
            RankError::GradeOutOfRange {
                grade: 2,
                num_grades: 2
            }
        );
        let err = QueryGroup::<f64>::from_pairs("q", [], 1).unwrap_err();
        assert_eq!(err, RankError::TooFewGrades(1));
    }

    #[test]
    fn tie_detection_ignores_same_grade() {
        assert!(!has_cross_grade_ties(&group(
            &[1, 1, 0],
            &[0.5, 0.5, 0.1],
            2
        )));
        assert!(has_cross_grade_ties(&group(
            &[1, 0, 0],
            &[0.5, 0.1, 0.5],
            2
        )));
        assert!(!has_cross_grade_ties(&group(&[1, 0], &[0.5, 0.1], 2)));
    }

    #[test]
    fn sequence_display_and_binarize() {
        let seq = RankedSequence::from_values([2, 0, 1]);
        assert_eq!(seq.to_string(), "[2,0,1]");
        assert_eq!(seq.binarize(0).values(), vec![1, 0, 1]);
        assert_eq!(seq.binarize(1).values(), vec![1, 0, 0]);
    }
}
