//! `stats` subcommands. Each returns the text to print.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use arcbench_core::record::parse_records;
use arcbench_core::stats::{
    accuracy_distribution, cronbach_alpha, estimate_ideal_accuracy, task_accuracies, validity_ratio, weighted_p, ReliabilityMatrix, BINS,
};
use arcbench_core::{LengthBucket, Pipeline};
use arcbench_harness::pipelines::{buckets_from_outcomes, validity_ledger, Verdict};
use arcbench_harness::report::read_generations;
use arcbench_harness::review::{apply_reviews, read_review_events, REVIEWS};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::exec(format!("{}: {e}", path.display())))
}

/// Rows of numbers separated by commas or whitespace; `#` starts a comment.
pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| CliError::invalid(format!("line {}: `{t}` is not a number", i + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Subjects in rows, raters or items in columns.
pub fn alpha(path: &Path) -> Result<String, CliError> {
    let rows = parse_table(&read(path)?)?;
    let (n, k) = (rows.len(), rows.first().map_or(0, Vec::len));
    let m = ReliabilityMatrix::new(rows).map_err(|e| CliError::invalid(e.to_string()))?;
    let a = cronbach_alpha(&m).map_err(|e| CliError::invalid(e.to_string()))?;
    Ok(format!("alpha = {a:.4} ({n} subjects, {k} raters)\n"))
}

/// Per-task accuracy histogram over evaluation records. When the records
/// include augmented variants, only those count, grouped by parent task.
pub fn distribution(path: &Path) -> Result<String, CliError> {
    let mut records = parse_records(&read(path)?).map_err(|e| CliError::invalid(e.to_string()))?;
    if records.iter().any(|r| r.task_id.contains('#')) {
        records.retain(|r| r.task_id.contains('#'));
        for r in &mut records {
            if let Some((parent, _)) = r.task_id.split_once('#') {
                r.task_id = parent.to_string();
            }
        }
    }
    let acc: Vec<f64> = task_accuracies::<f64>(&records).into_values().collect();
    let d = accuracy_distribution(&acc).map_err(|e| CliError::invalid(e.to_string()))?;
    let mut out = format!("{} tasks\nbin         count  share   at-least\n", acc.len());
    for i in 0..BINS {
        let close = if i + 1 == BINS { ']' } else { ')' };
        let label = format!("[{:.1}, {:.1}{close}", i as f64 / 10.0, (i + 1) as f64 / 10.0);
        writeln!(out, "{label:<11} {:>5}  {:.4}  {:.4}", d.counts[i], d.proportions[i], d.ccdf[i]).unwrap();
    }
    Ok(out)
}

/// Buckets from a JSON list of `{n, w, a}`, or from understanding records.
fn load_buckets(text: &str) -> Result<Vec<LengthBucket>, CliError> {
    if text.trim_start().starts_with('[') {
        let buckets: Vec<LengthBucket> = serde_json::from_str(text).map_err(|e| CliError::invalid(format!("buckets: {e}")))?;
        for b in &buckets {
            LengthBucket::new(b.n, b.w, b.a).map_err(|e| CliError::invalid(e.to_string()))?;
        }
        return Ok(buckets);
    }
    let records = parse_records(text).map_err(|e| CliError::invalid(e.to_string()))?;
    let outcomes: Vec<(usize, bool)> =
        records.iter().filter(|r| r.pipeline == Pipeline::Understanding).filter_map(|r| Some((r.steps?, r.result_correct))).collect();
    if outcomes.is_empty() {
        return Err(CliError::invalid("no dsl understanding records with step counts"));
    }
    buckets_from_outcomes(&outcomes).map_err(|e| CliError::invalid(e.to_string()))
}

pub fn composition(path: &Path, y: Option<f64>) -> Result<String, CliError> {
    let buckets = load_buckets(&read(path)?)?;
    let p = weighted_p(&buckets).map_err(|e| CliError::invalid(e.to_string()))?;
    let mut out = String::from("n   w        a\n");
    for b in &buckets {
        writeln!(out, "{:<3} {:<8} {:.4}", b.n, b.w, b.a).unwrap();
    }
    writeln!(out, "p = {p}").unwrap();
    if let Some(y) = y {
        let e = estimate_ideal_accuracy(y, p, &buckets).map_err(|e| CliError::invalid(e.to_string()))?;
        writeln!(out, "x_hat = {:.6}\ny at p = 1: {:.6}", e.x_hat, e.y_at_p1).unwrap();
    }
    Ok(out)
}

/// Validity ratios from `generations.jsonl`, with verdicts from a
/// `reviews.jsonl` beside it.
pub fn validity(path: &Path) -> Result<String, CliError> {
    let mut gens = read_generations(path).map_err(|e| CliError::invalid(e.to_string()))?;
    if gens.is_empty() {
        return Err(CliError::invalid(format!("{}: no generation records", path.display())));
    }
    let reviews = path.parent().unwrap_or(Path::new(".")).join(REVIEWS);
    apply_reviews(&mut gens, &read_review_events(&reviews).map_err(|e| CliError::invalid(e.to_string()))?)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    let r = validity_ratio(&validity_ledger(&gens)).map_err(|e| CliError::invalid(e.to_string()))?;
    let width = r.categories.iter().map(|c| c.category.len()).max().unwrap_or(8).max(8);
    let mut out = format!("{:<width$}  generated  valid  ratio\n", "category");
    for c in &r.categories {
        writeln!(out, "{:<width$}  {:>9}  {:>5}  {}", c.category, c.generated, c.valid, c.percent).unwrap();
    }
    writeln!(out, "{:<width$}  {:>9}  {:>5}  {}", "total", r.total_generated, r.total_valid, r.total).unwrap();
    let pending = gens.iter().filter(|g| g.verdict == Verdict::Pending).count();
    if pending > 0 {
        writeln!(out, "{pending} candidates still pending review").unwrap();
    }
    Ok(out)
}
