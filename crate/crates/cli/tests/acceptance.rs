//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use linear_ndcg::equivalence::{distinct_permutations, grade_multisets};
use linear_ndcg::verify::random_tie_free_group;
use linear_ndcg::{
    bipartite_ideal_dcg, brute_force_oracle, build_exchange_sequence, dcg_error_linear, dcg_linear,
    exchange_decrements, ideal_dcg_linear, ndcg_linear, pairwise_loss_fast, pairwise_loss_naive,
    rank_by_score, threshold_decomposition, Group, RankedSequence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Scores `n, n-1, ..., 1` so the induced ranking is exactly `order`.
fn group_in_order(order: &[u32], num_grades: u32) -> Group {
    let n = order.len();
    Group::from_pairs(
        "golden",
        order.iter().enumerate().map(|(i, &g)| (g, (n - i) as f64)),
        num_grades,
    )
    .unwrap()
}

/// The arrangement must appear in the exhaustive oracle with the expected
/// error before its values are trusted.
fn oracle_confirms(order: &[u32], expected: u64) -> Result<(), String> {
    let key = RankedSequence::from_values(order.iter().copied()).to_string();
    let records = brute_force_oracle(order, 8).map_err(|e| e.to_string())?;
    let rec = records
        .iter()
        .find(|r| r.instance_id == key)
        .ok_or_else(|| format!("oracle never produced {key}"))?;
    ensure(rec.passed && rec.lhs == expected, || {
        format!("oracle disagrees on {key}: {rec}")
    })?;
    ensure(records.iter().all(|r| r.passed), || {
        "oracle mismatch on a sibling arrangement".into()
    })
}

fn golden(order: &[u32], num_grades: u32, ideal: u64, observed: u64, error: u64) -> Outcome {
    oracle_confirms(order, error)?;
    let group = group_in_order(order, num_grades);
    let start = Instant::now();
    let ranked = rank_by_score(&group).map_err(|e| e.to_string())?;
    let got_ideal = ideal_dcg_linear(&group).unwrap();
    let got_observed = dcg_linear(&ranked).unwrap();
    let got_error = dcg_error_linear(&group).unwrap();
    let got_loss = pairwise_loss_fast::<f64, _>(&group).unwrap().unnormalized;
    let elapsed = start.elapsed();
    ensure(ranked.values() == order, || format!("ranking {ranked}"))?;
    ensure(
        (got_ideal, got_observed, got_error, got_loss) == (ideal, observed, error, error),
        || format!("ideal {got_ideal} observed {got_observed} error {got_error} loss {got_loss}"),
    )?;
    ensure(elapsed < Duration::from_millis(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "ideal={got_ideal} dcg={got_observed} error={got_error} loss={got_loss} in {elapsed:?}"
    ))
}

fn c1_figure_two() -> Outcome {
    golden(&[1, 0, 0, 1, 1, 0], 2, 12, 8, 4)
}

fn c2_figure_three() -> Outcome {
    golden(&[2, 0, 1, 0, 1, 0, 0], 3, 21, 18, 3)
}

fn c3_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for size in 1..=7 {
        for multiset in grade_multisets(size, 4) {
            for rec in brute_force_oracle(&multiset, 8).map_err(|e| e.to_string())? {
                ensure(rec.passed, || format!("{rec}"))?;
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{checked} arrangements in {elapsed:?}"))
}

/// 1000 seeded groups, |S| <= 200, L in 2..=5; every other one has ties.
fn random_groups(seed: u64) -> Vec<Group> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1000)
        .map(|t| {
            let len = rng.random_range(1..=200);
            let l = rng.random_range(2..=5u32);
            if t % 2 == 0 {
                random_tie_free_group(&mut rng, format!("r{t}"), len, l)
            } else {
                let pairs: Vec<(u32, f64)> = (0..len)
                    .map(|_| (rng.random_range(0..l), f64::from(rng.random_range(0..10))))
                    .collect();
                Group::from_pairs(format!("r{t}"), pairs, l).unwrap()
            }
        })
        .collect()
}

fn c4_decomposition() -> Outcome {
    let groups = random_groups(4);
    for g in &groups {
        let loss = pairwise_loss_naive::<f64, _>(g).unwrap().unnormalized;
        let parts = threshold_decomposition(g).unwrap();
        ensure(parts.total() == loss, || {
            format!("{}: R_k sum {} vs R {loss}", g.query_id(), parts.total())
        })?;
        let ranked = rank_by_score(g).unwrap();
        let whole = dcg_linear(&ranked).unwrap();
        let split: u64 = (0..g.num_grades() - 1)
            .map(|k| dcg_linear(&ranked.binarize(k)).unwrap())
            .sum();
        ensure(whole == split, || {
            format!("{}: DCG {whole} vs split {split}", g.query_id())
        })?;
    }
    Ok(format!("{} groups", groups.len()))
}

fn c5_lemma() -> Outcome {
    let mut checked = 0usize;
    for m in 0..=6usize {
        for n in 0..=6usize {
            if m + n == 0 {
                continue;
            }
            let base: Vec<u32> = std::iter::repeat_n(1, m)
                .chain(std::iter::repeat_n(0, n))
                .collect();
            for perm in distinct_permutations(&base) {
                let seq = RankedSequence::from_values(perm);
                let ex = build_exchange_sequence(&seq).map_err(|e| e.to_string())?;
                ensure(ex.replay() == seq, || format!("replay of {seq}"))?;
                ensure(ex.len() <= m.min(n), || format!("{seq}: k = {}", ex.len()))?;
                let dec = exchange_decrements(&ex);
                ensure(dec.iter().all(|&d| d >= 1), || {
                    format!("{seq}: decrements {dec:?}")
                })?;
                let error = bipartite_ideal_dcg(m as u64, n as u64) - dcg_linear(&seq).unwrap();
                ensure(dec.iter().sum::<u64>() == error, || {
                    format!("{seq}: {dec:?} vs {error}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} bipartite arrangements"))
}

fn c6_fast_vs_naive() -> Outcome {
    let groups = random_groups(6);
    let mut tied = 0;
    for g in &groups {
        let naive = pairwise_loss_naive::<f64, _>(g).unwrap();
        let fast = pairwise_loss_fast::<f64, _>(g).unwrap();
        ensure(naive == fast, || {
            format!("{}: {naive:?} vs {fast:?}", g.query_id())
        })?;
        tied += usize::from(linear_ndcg::group::has_cross_grade_ties(g));
    }
    ensure(tied > 0, || "no tied groups generated".into())?;
    Ok(format!(
        "{} groups, {tied} with cross-grade ties",
        groups.len()
    ))
}

fn c7_closed_form() -> Outcome {
    for m in 0..=50u64 {
        for n in 0..=50u64 {
            if m + n == 0 {
                continue;
            }
            let ideal: Vec<u32> = std::iter::repeat_n(1, m as usize)
                .chain(std::iter::repeat_n(0, n as usize))
                .collect();
            let direct = dcg_linear(&RankedSequence::from_values(ideal)).unwrap();
            let closed = m * n + m * m.saturating_sub(1) / 2;
            ensure(
                direct == closed && bipartite_ideal_dcg(m, n) == closed,
                || format!("m={m} n={n}: {direct} vs {closed}"),
            )?;
        }
    }
    Ok("m, n in 0..=50".into())
}

fn c8_ndcg_identity() -> Outcome {
    let groups = random_groups(4);
    let mut non_degenerate = 0;
    for g in &groups {
        let ideal = ideal_dcg_linear(g).unwrap();
        let error = dcg_error_linear(g).unwrap();
        let observed = dcg_linear(&rank_by_score(g).unwrap()).unwrap();
        let ndcg = ndcg_linear::<f64, _>(g).unwrap();
        if ideal == 0 {
            ensure(ndcg.degenerate && ndcg.value == 1.0, || {
                format!("{}: degenerate {ndcg:?}", g.query_id())
            })?;
            continue;
        }
        non_degenerate += 1;
        // observed / ideal == 1 - error / ideal  <=>  observed * ideal == (ideal - error) * ideal
        ensure(observed * ideal == (ideal - error) * ideal, || {
            g.query_id().to_string()
        })?;
        ensure(ndcg.value == observed as f64 / ideal as f64, || {
            format!("{}: {}", g.query_id(), ndcg.value)
        })?;
    }
    Ok(format!("{non_degenerate} non-degenerate groups"))
}

fn c9_cli_determinism() -> Outcome {
    let args = [
        "verify",
        "--seed",
        "42",
        "--trials",
        "500",
        "--max-items",
        "100",
        "--max-grades",
        "5",
    ];
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_linear-ndcg"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    ensure(a.status.success(), || {
        format!(
            "exit {:?}: {}",
            a.status.code(),
            String::from_utf8_lossy(&a.stdout)
        )
    })?;
    ensure(b.status.success(), || {
        format!("second run exit {:?}", b.status.code())
    })?;
    ensure(a.stdout == b.stdout, || "outputs differ".into())?;
    let text = String::from_utf8_lossy(&a.stdout);
    ensure(
        text.lines()
            .filter(|l| l.starts_with("check "))
            .all(|l| l.ends_with(" 0 failed")),
        || text.to_string(),
    )?;
    let last = text.lines().last().unwrap_or_default().to_string();
    ensure(last.starts_with("result: PASS"), || text.to_string())?;
    Ok(last)
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("1 figure-2 reproduction", c1_figure_two),
        ("2 figure-3 reproduction", c2_figure_three),
        ("3 exhaustive identity, |S|<=7, L<=4", c3_exhaustive),
        ("4 threshold decomposition", c4_decomposition),
        ("5 exchange lemma, m,n<=6", c5_lemma),
        ("6 fast counter = naive counter", c6_fast_vs_naive),
        ("7 bipartite normalizer closed form", c7_closed_form),
        ("8 ndcg = 1 - error/ideal", c8_ndcg_identity),
        ("9 cli verify determinism", c9_cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
