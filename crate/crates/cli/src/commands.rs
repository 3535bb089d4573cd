use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::process::ExitCode;

use linear_ndcg::io::{parse_svmlight, parse_tsv, DatasetFile, IoError};
use linear_ndcg::report::round_sig6;
use linear_ndcg::verify::{self, VerifyConfig};
use linear_ndcg::{brute_force_oracle, AggregateReport, BigRational, Score};

use crate::{InputFormat, OutputFormat, ScalarKind};

pub const EXIT_FAILURE: ExitCode = ExitCode::FAILURE;
pub fn exit_usage() -> ExitCode {
    ExitCode::from(2)
}

pub type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

pub struct MetricsArgs {
    pub input: String,
    pub format: InputFormat,
    pub scores: Option<String>,
    pub num_grades: Option<u32>,
    pub output: OutputFormat,
    pub scalar: ScalarKind,
}

fn open(path: &str) -> io::Result<Box<dyn BufRead>> {
    if path == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn load<S: Score>(args: &MetricsArgs) -> Result<DatasetFile<S>, IoError> {
    let input = open(&args.input)?;
    let mut data = match args.format {
        InputFormat::Tsv => parse_tsv(input)?,
        InputFormat::Svmlight => {
            let scores = args.scores.as_deref().map(open).transpose()?;
            parse_svmlight(input, scores)?
        }
    };
    data.declared_num_grades = args.num_grades;
    Ok(data)
}

pub fn metrics(args: &MetricsArgs) -> CmdResult {
    if args.scores.is_some() && args.format != InputFormat::Svmlight {
        return Err("--scores only applies to --format svmlight".into());
    }
    let report = match args.scalar {
        ScalarKind::Exact => build::<BigRational>(args)?,
        ScalarKind::F64 => build::<f64>(args)?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match args.output {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        OutputFormat::Text => out.write_all(report.render_text().as_bytes())?,
        OutputFormat::Csv => write_csv(&report, &mut out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn build<S: Score>(args: &MetricsArgs) -> Result<AggregateReport<f64>, Box<dyn std::error::Error>> {
    let groups = load::<S>(args)?.into_groups()?;
    Ok(AggregateReport::build(&groups)?)
}

fn write_csv<W: Write>(
    report: &AggregateReport<f64>,
    out: W,
) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "query_id",
        "num_items",
        "dcg_linear",
        "ideal_dcg_linear",
        "ndcg_linear",
        "dcg_error_linear",
        "dcg_classic",
        "ideal_dcg_classic",
        "ndcg_classic",
        "pairwise_loss",
        "normalizer_z",
        "normalized_pairwise_loss",
        "degenerate_ndcg_linear",
        "degenerate_ndcg_classic",
        "degenerate_pairs",
        "tie_afflicted",
        "identity_passed",
    ])?;
    let f = |x: f64| round_sig6(x).to_string();
    for q in &report.per_query {
        let m = &q.metrics;
        w.write_record([
            q.query_id.clone(),
            m.num_items.to_string(),
            m.dcg_linear.to_string(),
            m.ideal_dcg_linear.to_string(),
            f(m.ndcg_linear),
            m.dcg_error_linear.to_string(),
            f(m.dcg_classic),
            f(m.ideal_dcg_classic),
            f(m.ndcg_classic),
            m.pairwise_loss.to_string(),
            m.normalizer_z.to_string(),
            f(m.normalized_pairwise_loss),
            m.degenerate_ndcg_linear.to_string(),
            m.degenerate_ndcg_classic.to_string(),
            m.degenerate_pairs.to_string(),
            q.check.tie_afflicted.to_string(),
            q.check.passed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn verify(config: VerifyConfig) -> CmdResult {
    let summary = verify::run(&config)?;
    println!(
        "verify seed={} trials={} max_items={} max_grades={} exhaustive_limit={}",
        config.seed, config.trials, config.max_items, config.max_grades, config.exhaustive_limit
    );
    print!("{summary}");
    Ok(if summary.total_failures() == 0 {
        ExitCode::SUCCESS
    } else {
        EXIT_FAILURE
    })
}

fn parse_grade_spec(spec: &str) -> Result<Vec<u32>, String> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad grade {:?} in --grades", t.trim()))
        })
        .collect()
}

pub fn oracle(spec: &str) -> CmdResult {
    let grades = parse_grade_spec(spec)?;
    let records = brute_force_oracle(&grades, linear_ndcg::equivalence::ORACLE_SIZE_LIMIT)?;
    let width = records
        .iter()
        .map(|r| r.instance_id.len())
        .max()
        .unwrap_or(0)
        .max(8);
    println!(
        "{:<width$}  {:>9}  {:>6}  ok",
        "ranking", "dcg_error", "loss"
    );
    let mut failures = 0;
    for r in &records {
        println!(
            "{:<width$}  {:>9}  {:>6}  {}",
            r.instance_id,
            r.lhs,
            r.rhs,
            if r.passed { "yes" } else { "NO" }
        );
        failures += usize::from(!r.passed);
    }
    println!("{} arrangements, {} mismatches", records.len(), failures);
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        EXIT_FAILURE
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grade_spec() {
        assert_eq!(parse_grade_spec("2,1, 1,0"), Ok(vec![2, 1, 1, 0]));
        assert!(parse_grade_spec("2,,1").is_err());
        assert!(parse_grade_spec("-1").is_err());
    }
}
