//! Summaries of an experiment directory: `summary.json` for machines and
//! `report.txt` for people. Both are pure functions of the logs, so a
//! replayed run reproduces them byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use arcbench_core::record::{apply_annotations, parse_annotations, parse_records, Condition, EvalRecord, Pipeline, RecordError};
use arcbench_core::stats::{
    accuracy_distribution, cost_per_valid, estimate_ideal_accuracy, validity_ratio, weighted_p, IdealEstimate, ValidityReport, BINS,
};
use arcbench_core::{AccuracyDistribution, LengthBucket, TokenCost};
use serde::Serialize;
use thiserror::Error;

use crate::gateway::PriceTable;
use crate::pipelines::{buckets_from_outcomes, validity_ledger, GenerationRecord, Verdict};
use crate::plan::{ExperimentPlan, PlanPipeline};
use crate::review::{apply_reviews, read_review_events, ReviewLogError, REVIEWS};
use crate::run::{GENERATIONS, RECORDS};

pub const SUMMARY: &str = "summary.json";
pub const REPORT: &str = "report.txt";
pub const ANNOTATIONS: &str = "annotations.jsonl";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Records(#[from] RecordError),
    #[error("{path} line {line}: {source}")]
    Generations { path: PathBuf, line: usize, source: serde_json::Error },
    #[error(transparent)]
    Reviews(#[from] ReviewLogError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub pipeline: Pipeline,
    pub condition: String,
    /// `original` tasks or `augmented` variants.
    pub set: &'static str,
    pub attempts: usize,
    pub result_correct: usize,
    /// Records carrying a human process judgment.
    pub annotated: usize,
    /// Result and process both correct.
    pub fully_correct: usize,
    pub result_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceSummary {
    pub tasks: usize,
    /// Solved in at least one phase-1 repeat.
    pub qualifying: usize,
    /// Solved in every phase-1 repeat.
    pub solved_every_repeat: usize,
    pub accuracy: BTreeMap<String, f64>,
    pub distribution: Option<AccuracyDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnderstandingSummary {
    pub buckets: Vec<LengthBucket>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionRow {
    pub condition: String,
    pub y: f64,
    pub p: f64,
    pub estimate: Option<IdealEstimate<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValiditySummary {
    pub report: ValidityReport,
    pub pending: usize,
    pub auto_invalid: usize,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_per_valid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub results: Vec<ResultRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub understanding: Option<UnderstandingSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub composition: Vec<CompositionRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validity: Option<ValiditySummary>,
}

fn read_optional(path: &Path) -> Result<String, ReportError> {
    match fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
        Err(source) => Err(ReportError::Io { path: path.to_path_buf(), source }),
    }
}

pub fn read_generations(path: &Path) -> Result<Vec<GenerationRecord>, ReportError> {
    read_optional(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| ReportError::Generations { path: path.to_path_buf(), line: i + 1, source }))
        .collect()
}

fn is_variant(r: &EvalRecord) -> bool {
    r.task_id.contains('#')
}

fn result_rows(records: &[EvalRecord]) -> Vec<ResultRow> {
    let mut groups: BTreeMap<(Pipeline, Condition, bool), Vec<&EvalRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.pipeline, r.condition, is_variant(r))).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((pipeline, condition, variant), rs)| {
            let correct = rs.iter().filter(|r| r.result_correct).count();
            ResultRow {
                pipeline,
                condition: condition.label(),
                set: if variant { "augmented" } else { "original" },
                attempts: rs.len(),
                result_correct: correct,
                annotated: rs.iter().filter(|r| r.process_correct.is_some()).count(),
                fully_correct: rs.iter().filter(|r| r.fully_correct()).count(),
                result_accuracy: correct as f64 / rs.len() as f64,
            }
        })
        .collect()
}

fn coherence(records: &[EvalRecord]) -> CoherenceSummary {
    let mut phase1: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut phase2: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.pipeline == Pipeline::Cot) {
        let (map, id) = match r.task_id.split_once('#') {
            Some((parent, _)) => (&mut phase2, parent),
            None => (&mut phase1, r.task_id.as_str()),
        };
        let e = map.entry(id).or_default();
        e.0 += usize::from(r.result_correct);
        e.1 += 1;
    }
    let accuracy: BTreeMap<String, f64> = phase2.iter().map(|(id, (ok, n))| (id.to_string(), *ok as f64 / *n as f64)).collect();
    let values: Vec<f64> = accuracy.values().copied().collect();
    CoherenceSummary {
        tasks: phase1.len(),
        qualifying: phase1.values().filter(|(ok, _)| *ok > 0).count(),
        solved_every_repeat: phase1.values().filter(|(ok, n)| ok == n).count(),
        distribution: accuracy_distribution(&values).ok(),
        accuracy,
    }
}

fn understanding(records: &[EvalRecord]) -> Option<UnderstandingSummary> {
    let outcomes: Vec<(usize, bool)> =
        records.iter().filter(|r| r.pipeline == Pipeline::Understanding).filter_map(|r| Some((r.steps?, r.result_correct))).collect();
    let buckets = buckets_from_outcomes(&outcomes).ok()?;
    let p = weighted_p(&buckets).ok()?;
    Some(UnderstandingSummary { buckets, p })
}

fn composition(records: &[EvalRecord], u: &UnderstandingSummary) -> Vec<CompositionRow> {
    let mut by_condition: BTreeMap<Condition, (usize, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.pipeline == Pipeline::Dsl) {
        let e = by_condition.entry(r.condition).or_default();
        e.0 += usize::from(r.result_correct);
        e.1 += 1;
    }
    by_condition
        .into_iter()
        .map(|(c, (ok, n))| {
            let y = ok as f64 / n as f64;
            let (estimate, note) = match estimate_ideal_accuracy(y, u.p, &u.buckets) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            CompositionRow { condition: c.label(), y, p: u.p, estimate, note }
        })
        .collect()
}

fn validity(gens: &[GenerationRecord], model: &str, prices: Option<&PriceTable>) -> Option<ValiditySummary> {
    let report = validity_ratio(&validity_ledger(gens)).ok()?;
    // Candidates from one call share its tokens; count each exchange once.
    let mut exchanges: BTreeMap<(&str, &str, usize), (u64, u64)> = BTreeMap::new();
    for g in gens {
        exchanges.insert((&g.task_id, &g.exchange, g.target_index), (g.prompt_tokens, g.completion_tokens));
    }
    let prompt_tokens = exchanges.values().map(|t| t.0).sum();
    let completion_tokens = exchanges.values().map(|t| t.1).sum();
    let cost = prices.and_then(|t| t.get(model)).and_then(|p| {
        let costs: Vec<TokenCost> = exchanges.values().map(|&(i, o)| TokenCost::new(i, o, p.input, p.output)).collect();
        cost_per_valid(&costs, report.total_valid).ok()
    });
    Some(ValiditySummary {
        pending: gens.iter().filter(|g| g.verdict == Verdict::Pending).count(),
        auto_invalid: gens.iter().filter(|g| g.reviewer.as_deref().is_some_and(|r| r.starts_with("auto:"))).count(),
        report,
        prompt_tokens,
        completion_tokens,
        cost_per_valid: cost,
    })
}

/// Summarises an experiment directory. Human process judgments are read
/// from `annotations.jsonl` and candidate verdicts from `reviews.jsonl`
/// when present.
pub fn build_summary(plan: &ExperimentPlan, dir: &Path, prices: Option<&PriceTable>) -> Result<Summary, ReportError> {
    let mut records = parse_records(&read_optional(&dir.join(RECORDS))?)?;
    let annotations = parse_annotations(&read_optional(&dir.join(ANNOTATIONS))?)?;
    apply_annotations(&mut records, &annotations)?;
    let mut gens = read_generations(&dir.join(GENERATIONS))?;
    apply_reviews(&mut gens, &read_review_events(&dir.join(REVIEWS))?)?;

    let has = |p| plan.pipelines.contains(&p);
    let understanding = understanding(&records);
    Ok(Summary {
        experiment: plan.name.clone(),
        results: result_rows(&records),
        coherence: has(PlanPipeline::InferentialCoherence).then(|| coherence(&records)),
        composition: understanding.as_ref().map(|u| composition(&records, u)).unwrap_or_default(),
        understanding,
        validity: if has(PlanPipeline::Itp) { validity(&gens, &plan.generation.model, prices) } else { None },
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

pub fn render_text(s: &Summary) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "experiment {}", s.experiment).unwrap();

    writeln!(w, "\nresults").unwrap();
    writeln!(w, "{:<14} {:<14} {:<10} {:>8} {:>8} {:>9} {:>8} {:>9}", "pipeline", "condition", "set", "attempts", "correct", "accuracy", "judged", "fully ok").unwrap();
    for r in &s.results {
        writeln!(
            w,
            "{:<14} {:<14} {:<10} {:>8} {:>8} {:>9} {:>8} {:>9}",
            r.pipeline.as_str(),
            r.condition,
            r.set,
            r.attempts,
            r.result_correct,
            pct(r.result_accuracy),
            r.annotated,
            r.fully_correct
        )
        .unwrap();
    }

    if let Some(c) = &s.coherence {
        writeln!(w, "\ninferential coherence").unwrap();
        writeln!(w, "tasks {}  solved at least once {}  solved every repeat {}", c.tasks, c.qualifying, c.solved_every_repeat).unwrap();
        for (id, a) in &c.accuracy {
            writeln!(w, "  {id:<12} {}", pct(*a)).unwrap();
        }
        if let Some(d) = &c.distribution {
            writeln!(w, "{:<12} {:>6} {:>10} {:>10}", "bin", "tasks", "share", "at least").unwrap();
            for i in 0..BINS {
                let label = format!("[{:.1},{:.1}{}", i as f64 / 10.0, (i + 1) as f64 / 10.0, if i + 1 == BINS { "]" } else { ")" });
                writeln!(w, "{label:<12} {:>6} {:>10.4} {:>10.4}", d.counts[i], d.proportions[i], d.ccdf[i]).unwrap();
            }
        }
    }

    if let Some(u) = &s.understanding {
        writeln!(w, "\nDSL understanding").unwrap();
        writeln!(w, "{:>4} {:>8} {:>9}", "n", "w_n", "a_n").unwrap();
        for b in &u.buckets {
            writeln!(w, "{:>4} {:>8} {:>9}", b.n, b.w, pct(b.a)).unwrap();
        }
        writeln!(w, "weighted single-step accuracy p = {:.6}", u.p).unwrap();
    }

    if !s.composition.is_empty() {
        writeln!(w, "\nDSL composition").unwrap();
        writeln!(w, "{:<14} {:>9} {:>9} {:>10} {:>11}", "condition", "y", "p", "x", "y at p=1").unwrap();
        for c in &s.composition {
            match &c.estimate {
                Some(e) => writeln!(w, "{:<14} {:>9} {:>9.6} {:>10.6} {:>11}", c.condition, pct(c.y), c.p, e.x_hat, pct(e.y_at_p1)).unwrap(),
                None => writeln!(w, "{:<14} {:>9} {:>9.6}  no estimate: {}", c.condition, pct(c.y), c.p, c.note.as_deref().unwrap_or("")).unwrap(),
            }
        }
    }

    if let Some(v) = &s.validity {
        writeln!(w, "\ngenerated examples").unwrap();
        writeln!(w, "{:<16} {:>9} {:>7} {:>8}", "category", "generated", "valid", "ratio").unwrap();
        for c in &v.report.categories {
            writeln!(w, "{:<16} {:>9} {:>7} {:>8}", c.category, c.generated, c.valid, c.percent.to_string()).unwrap();
        }
        writeln!(w, "{:<16} {:>9} {:>7} {:>8}", "total", v.report.total_generated, v.report.total_valid, v.report.total.to_string()).unwrap();
        writeln!(w, "pending review {}  auto-invalid {}", v.pending, v.auto_invalid).unwrap();
        writeln!(w, "tokens in {}  out {}", v.prompt_tokens, v.completion_tokens).unwrap();
        if let Some(c) = v.cost_per_valid {
            writeln!(w, "cost per valid example ${c:.4}").unwrap();
        }
    }
    out
}

/// Writes `summary.json` and `report.txt` into `dir`.
pub fn write_reports(plan: &ExperimentPlan, dir: &Path, prices: Option<&PriceTable>) -> Result<Summary, ReportError> {
    let summary = build_summary(plan, dir, prices)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    for (name, body) in [(SUMMARY, json), (REPORT, render_text(&summary))] {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|source| ReportError::Io { path: p.clone(), source })?;
    }
    Ok(summary)
}
