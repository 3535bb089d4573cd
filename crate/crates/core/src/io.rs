//! Dataset readers: tab-separated `query<TAB>grade<TAB>score` and LETOR /
//! SVMlight rows with scores in a trailing `# score=V` comment or a
//! companion file.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

use crate::error::RankError;
use crate::group::{QueryGroup, RatedItem};
use crate::scalar::Score;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

fn join_lines(errors: &[LineError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Error, Debug)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {}", join_lines(.0))]
    Parse(Vec<LineError>),

    #[error("no data records in input")]
    EmptyFile,

    #[error("{rows} data rows but {scores} scores")]
    ScoreCountMismatch { rows: usize, scores: usize },

    #[error(transparent)]
    Rank(#[from] RankError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record<S> {
    pub query_id: String,
    pub grade: u32,
    pub score: S,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile<S> {
    pub records: Vec<Record<S>>,
    pub declared_num_grades: Option<u32>,
}

/// Everything a lenient pass over the input found.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan<S> {
    pub records: Vec<Record<S>>,
    pub rejected: Vec<LineError>,
    /// Non-blank, non-comment lines seen.
    pub considered: usize,
}

impl<S> Scan<S> {
    fn into_dataset(self) -> Result<DatasetFile<S>, IoError> {
        if !self.rejected.is_empty() {
            return Err(IoError::Parse(self.rejected));
        }
        if self.records.is_empty() {
            return Err(IoError::EmptyFile);
        }
        Ok(DatasetFile {
            records: self.records,
            declared_num_grades: None,
        })
    }
}

fn parse_grade(text: &str) -> Result<u32, String> {
    let text = text.trim();
    if text.starts_with('-') && text.len() > 1 {
        return Err(format!("negative grade {text:?}"));
    }
    text.parse()
        .map_err(|_| format!("grade {text:?} is not a non-negative integer"))
}

fn parse_score<S: Score>(text: &str) -> Result<S, String> {
    let score = S::parse_decimal(text).ok_or_else(|| format!("score {text:?} is not a number"))?;
    if !score.is_finite_score() {
        return Err(format!("score {text:?} is not finite"));
    }
    Ok(score)
}

/// Lines to skip: blank, or starting with `#`.
fn is_ignorable(line: &str) -> bool {
    let trimmed = line.trim();
    trimmed.is_empty() || trimmed.starts_with('#')
}

pub fn scan_tsv<S: Score, R: BufRead>(reader: R) -> Result<Scan<S>, IoError> {
    let mut scan = Scan {
        records: Vec::new(),
        rejected: Vec::new(),
        considered: 0,
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if is_ignorable(&line) {
            continue;
        }
        scan.considered += 1;
        match parse_tsv_line(line.trim_end_matches('\r')) {
            Ok((query_id, grade, score)) => scan.records.push(Record {
                query_id,
                grade,
                score,
                line: line_no,
            }),
            Err(reason) => scan.rejected.push(LineError {
                line: line_no,
                reason,
            }),
        }
    }
    Ok(scan)
}

fn parse_tsv_line<S: Score>(line: &str) -> Result<(String, u32, S), String> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [query_id, grade, score] = fields[..] else {
        return Err(format!(
            "expected 3 tab-separated fields, found {}",
            fields.len()
        ));
    };
    let query_id = query_id.trim();
    if query_id.is_empty() {
        return Err("empty query id".to_string());
    }
    Ok((
        query_id.to_string(),
        parse_grade(grade)?,
        parse_score(score)?,
    ))
}

pub fn parse_tsv<S: Score, R: BufRead>(reader: R) -> Result<DatasetFile<S>, IoError> {
    scan_tsv(reader)?.into_dataset()
}

pub fn scan_svmlight<S: Score, R: BufRead, P: BufRead>(
    reader: R,
    scores: Option<P>,
) -> Result<Scan<S>, IoError> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if !is_ignorable(&line) {
            rows.push((idx + 1, line));
        }
    }

    let companion: Option<Vec<(usize, String)>> = match scores {
        Some(p) => {
            let mut out = Vec::new();
            for (idx, line) in p.lines().enumerate() {
                let line = line?;
                if !line.trim().is_empty() {
                    out.push((idx + 1, line.trim().to_string()));
                }
            }
            if out.len() != rows.len() {
                return Err(IoError::ScoreCountMismatch {
                    rows: rows.len(),
                    scores: out.len(),
                });
            }
            Some(out)
        }
        None => None,
    };

    let mut scan = Scan {
        records: Vec::new(),
        rejected: Vec::new(),
        considered: rows.len(),
    };
    for (row, (line_no, line)) in rows.iter().enumerate() {
        let external = companion.as_ref().map(|c| &c[row]);
        match parse_svmlight_line(line, external) {
            Ok((query_id, grade, score)) => scan.records.push(Record {
                query_id,
                grade,
                score,
                line: *line_no,
            }),
            Err(reason) => scan.rejected.push(LineError {
                line: *line_no,
                reason,
            }),
        }
    }
    Ok(scan)
}

fn parse_svmlight_line<S: Score>(
    line: &str,
    external: Option<&(usize, String)>,
) -> Result<(String, u32, S), String> {
    let (data, comment) = line.split_once('#').unwrap_or((line, ""));
    let mut tokens = data.split_whitespace();
    let grade = parse_grade(tokens.next().ok_or("missing grade")?)?;

    let mut query_id = None;
    for token in tokens {
        let (key, value) = token
            .split_once(':')
            .ok_or_else(|| format!("malformed feature {token:?}"))?;
        if key == "qid" {
            if value.is_empty() {
                return Err("empty qid".to_string());
            }
            query_id = Some(value.to_string());
        } else if key.parse::<u64>().is_err() {
            return Err(format!("malformed feature {token:?}"));
        }
    }
    let query_id = query_id.ok_or("missing qid")?;

    let score = match external {
        Some((score_line, text)) => {
            parse_score(text).map_err(|e| format!("{e} (scores line {score_line})"))?
        }
        None => {
            let text = comment
                .split_whitespace()
                .find_map(|t| t.strip_prefix("score="))
                .ok_or("missing score")?;
            parse_score(text)?
        }
    };
    Ok((query_id, grade, score))
}

pub fn parse_svmlight<S: Score, R: BufRead, P: BufRead>(
    reader: R,
    scores: Option<P>,
) -> Result<DatasetFile<S>, IoError> {
    scan_svmlight(reader, scores)?.into_dataset()
}

impl<S: Score> DatasetFile<S> {
    /// Grade alphabet size: the declared value, else the largest grade + 1
    /// over the whole file (never below 2).
    pub fn num_grades(&self) -> u32 {
        self.declared_num_grades.unwrap_or_else(|| {
            self.records
                .iter()
                .map(|r| r.grade)
                .max()
                .unwrap_or(0)
                .saturating_add(1)
                .max(2)
        })
    }

    /// One group per query, sorted by query id; items keep file order.
    pub fn into_groups(self) -> Result<Vec<QueryGroup<S>>, IoError> {
        let num_grades = self.num_grades();
        let mut by_query: BTreeMap<String, Vec<RatedItem<S>>> = BTreeMap::new();
        for record in self.records {
            if record.grade >= num_grades {
                return Err(IoError::Parse(vec![LineError {
                    line: record.line,
                    reason: format!(
                        "grade {} exceeds declared alphabet 0..{num_grades}",
                        record.grade
                    ),
                }]));
            }
            by_query
                .entry(record.query_id)
                .or_default()
                .push(RatedItem::new(record.grade, record.score));
        }
        by_query
            .into_iter()
            .map(|(id, items)| Ok(QueryGroup::new(id, items, num_grades)?))
            .collect()
    }
}
