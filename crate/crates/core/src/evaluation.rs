//! Evaluation metrics and reports.
//!
//! Sentence selection and full extraction are scored as exact-match
//! accuracies: a system emits one sentence (and one duration) per case, so
//! every false positive is paired with a false negative and precision,
//! recall and F1 coincide.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{CaseGold, Decision};
use crate::error::{ApeError, Result};
use crate::extraction::ExtractionResult;
use crate::lexicon::{Lexicon, Tier};
use crate::numbers::{all_spans, NumberOptions};
use crate::text;

// ---------------------------------------------------------------------------
// Stage-1 precision / recall

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// No predictions were made; precision is reported as 0.
    #[serde(default)]
    pub precision_undefined: bool,
    /// The gold set is empty; recall is reported as 0.
    #[serde(default)]
    pub recall_undefined: bool,
}

pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Micro-averaged set precision, recall and F1 over `(case_id, sentence)` pairs.
pub fn stage1_prf<K: Ord>(predicted: &BTreeSet<K>, gold: &BTreeSet<K>) -> PrfScore {
    let tp = predicted.intersection(gold).count() as f64;
    let precision_undefined = predicted.is_empty();
    let recall_undefined = gold.is_empty();
    let precision = if precision_undefined { 0.0 } else { tp / predicted.len() as f64 };
    let recall = if recall_undefined { 0.0 } else { tp / gold.len() as f64 };
    PrfScore {
        precision,
        recall,
        f1: harmonic_mean(precision, recall),
        precision_undefined,
        recall_undefined,
    }
}

/// Fraction of cases whose selected sentence is one of the gold sentences.
pub fn selection_f1(
    predictions: &BTreeMap<String, Option<usize>>,
    gold: &BTreeMap<String, BTreeSet<usize>>,
) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    let hits = predictions
        .iter()
        .filter(|(case, pred)| match (pred, gold.get(*case)) {
            (Some(idx), Some(g)) => g.contains(idx),
            _ => false,
        })
        .count();
    hits as f64 / predictions.len() as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ApeScore {
    pub ape_f1: f64,
    pub avg_month_error: f64,
}

/// Exact-match rate and mean absolute error in months over the gold cases.
/// A missing prediction is a miss and contributes its gold value to the error.
pub fn ape_f1_and_error(
    predicted_months: &BTreeMap<String, Option<u32>>,
    gold_months: &BTreeMap<String, u32>,
) -> ApeScore {
    if gold_months.is_empty() {
        return ApeScore::default();
    }
    let mut exact = 0usize;
    let mut abs_err = 0.0;
    for (case, &gold) in gold_months {
        match predicted_months.get(case).copied().flatten() {
            Some(p) => {
                if p == gold {
                    exact += 1;
                }
                abs_err += (p as f64 - gold as f64).abs();
            }
            None => abs_err += gold as f64,
        }
    }
    let n = gold_months.len() as f64;
    ApeScore {
        ape_f1: exact as f64 / n,
        avg_month_error: abs_err / n,
    }
}

// ---------------------------------------------------------------------------
// Agreement

/// The three rating classes used when experts audit selected sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementLabel {
    Indicative,
    NotIndicative,
    CannotDecide,
}

impl AgreementLabel {
    pub const ALL: [AgreementLabel; 3] = [
        AgreementLabel::Indicative,
        AgreementLabel::NotIndicative,
        AgreementLabel::CannotDecide,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaResult {
    pub kappa: f64,
    pub observed: f64,
    pub expected: f64,
    /// Chance agreement is 1, so the ratio is undefined and a convention applies.
    pub degenerate: bool,
}

/// Cohen's kappa for two raters.
pub fn cohen_kappa<L: Ord>(ratings_a: &[L], ratings_b: &[L]) -> Result<KappaResult> {
    if ratings_a.len() != ratings_b.len() {
        return Err(ApeError::Metric(format!(
            "rating length mismatch: {} vs {}",
            ratings_a.len(),
            ratings_b.len()
        )));
    }
    if ratings_a.is_empty() {
        return Err(ApeError::Metric("no ratings".into()));
    }
    let n = ratings_a.len() as f64;
    let observed = ratings_a.iter().zip(ratings_b).filter(|(a, b)| a == b).count() as f64 / n;
    let mut marg_a: BTreeMap<&L, usize> = BTreeMap::new();
    let mut marg_b: BTreeMap<&L, usize> = BTreeMap::new();
    for l in ratings_a {
        *marg_a.entry(l).or_default() += 1;
    }
    for l in ratings_b {
        *marg_b.entry(l).or_default() += 1;
    }
    let expected: f64 = marg_a
        .iter()
        .map(|(l, &ca)| ca as f64 / n * marg_b.get(l).copied().unwrap_or(0) as f64 / n)
        .sum();
    if (1.0 - expected).abs() < 1e-15 {
        return Ok(KappaResult {
            kappa: if observed == 1.0 { 1.0 } else { 0.0 },
            observed,
            expected,
            degenerate: true,
        });
    }
    Ok(KappaResult {
        kappa: (observed - expected) / (1.0 - expected),
        observed,
        expected,
        degenerate: false,
    })
}

/// Fleiss' kappa over an item × rater matrix. Every item must be rated by
/// the same number (at least two) of raters, with labels from `categories`.
pub fn fleiss_kappa<L: Ord>(ratings: &[Vec<Option<L>>], categories: &[L]) -> Result<KappaResult> {
    if ratings.is_empty() {
        return Err(ApeError::Metric("no items".into()));
    }
    let raters = ratings[0].len();
    if raters < 2 {
        return Err(ApeError::Metric("need at least two raters".into()));
    }
    let mut totals = vec![0usize; categories.len()];
    let mut per_item_agreement = 0.0;
    for (i, row) in ratings.iter().enumerate() {
        if row.len() != raters {
            return Err(ApeError::Metric(format!(
                "item {i} has {} ratings, expected {raters}",
                row.len()
            )));
        }
        let mut counts = vec![0usize; categories.len()];
        for (r, label) in row.iter().enumerate() {
            let label = label
                .as_ref()
                .ok_or_else(|| ApeError::Metric(format!("missing rating: item {i}, rater {r}")))?;
            let c = categories
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| ApeError::Metric(format!("unknown label at item {i}, rater {r}")))?;
            counts[c] += 1;
        }
        let sq: usize = counts.iter().map(|c| c * c).sum();
        per_item_agreement += (sq - raters) as f64 / (raters * (raters - 1)) as f64;
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t += c;
        }
    }
    let n_items = ratings.len() as f64;
    let observed = per_item_agreement / n_items;
    let all = n_items * raters as f64;
    let expected: f64 = totals.iter().map(|&t| (t as f64 / all).powi(2)).sum();
    if (1.0 - expected).abs() < 1e-15 {
        return Ok(KappaResult {
            kappa: 1.0,
            observed,
            expected,
            degenerate: true,
        });
    }
    Ok(KappaResult {
        kappa: (observed - expected) / (1.0 - expected),
        observed,
        expected,
        degenerate: false,
    })
}

// ---------------------------------------------------------------------------
// Error taxonomy

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Probation,
    PriorCaseReference,
    Fine,
    Procedural,
    Misc,
}

static DOCKET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+/\d+").unwrap());

/// Category of a wrongly selected sentence. First match wins, in the order
/// probation, prior-case reference, fine, procedural.
pub fn categorize_error(sentence_text: &str, lexicon: &Lexicon) -> ErrorCategory {
    if lexicon.probation_markers.contained_in(sentence_text) {
        return ErrorCategory::Probation;
    }
    let docket_word = lexicon
        .tier(Tier::ModerateNegative)
        .find_in(sentence_text)
        .iter()
        .any(|m| !text::is_symbol_entry(&m.surface));
    if DOCKET.is_match(sentence_text)
        || docket_word
        || lexicon.past_tense_markers.contained_in(sentence_text)
    {
        return ErrorCategory::PriorCaseReference;
    }
    if lexicon.fine_markers.contained_in(sentence_text) {
        return ErrorCategory::Fine;
    }
    let has_number = !all_spans(sentence_text, &lexicon.numerals, &NumberOptions::default()).is_empty();
    let has_unit = text::normalized_tokens(sentence_text)
        .iter()
        .any(|t| lexicon.numerals.is_unit_word(t));
    if has_number && !has_unit {
        return ErrorCategory::Procedural;
    }
    ErrorCategory::Misc
}

// ---------------------------------------------------------------------------
// Histogram

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBucket {
    pub start: u32,
    /// Inclusive.
    pub end: u32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PunishmentHistogram {
    pub bucket_months: u32,
    /// Non-empty buckets in ascending order.
    pub buckets: Vec<HistogramBucket>,
    pub total: usize,
    pub median: Option<f64>,
    pub fraction_at_most_15_months: Option<f64>,
}

impl PunishmentHistogram {
    /// `bucket_start,bucket_end,count` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bucket_start,bucket_end,count\n");
        for b in &self.buckets {
            let _ = writeln!(out, "{},{},{}", b.start, b.end, b.count);
        }
        out
    }
}

/// Histogram of extracted terms (cases without a term are skipped).
pub fn punishment_histogram(results: &[ExtractionResult], bucket_months: u32) -> Result<PunishmentHistogram> {
    if bucket_months == 0 {
        return Err(ApeError::Config("bucket width must be at least 1 month".into()));
    }
    let mut months: Vec<u32> = results.iter().filter_map(|r| r.months).collect();
    months.sort_unstable();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for m in &months {
        *counts.entry(m / bucket_months).or_default() += 1;
    }
    let buckets = counts
        .into_iter()
        .map(|(b, count)| HistogramBucket {
            start: b * bucket_months,
            end: b * bucket_months + bucket_months - 1,
            count,
        })
        .collect();
    let n = months.len();
    let median = (n > 0).then(|| {
        if n % 2 == 1 {
            months[n / 2] as f64
        } else {
            (months[n / 2 - 1] as f64 + months[n / 2] as f64) / 2.0
        }
    });
    let at_most_15 = (n > 0).then(|| months.iter().filter(|m| **m <= 15).count() as f64 / n as f64);
    Ok(PunishmentHistogram {
        bucket_months,
        buckets,
        total: n,
        median,
        fraction_at_most_15_months: at_most_15,
    })
}

// ---------------------------------------------------------------------------
// Reports

/// What a system predicted for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasePrediction {
    pub case_id: String,
    /// Sentences tagged positive before the per-document argmax.
    pub stage1: Vec<usize>,
    pub selected: Option<usize>,
    pub months: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case_id: String,
    pub predicted_index: Option<usize>,
    pub gold_indices: Vec<usize>,
    pub predicted_months: Option<u32>,
    pub gold_months: u32,
    pub error_category: Option<ErrorCategory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub test_cases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub num_cases: usize,
    pub stage1: PrfScore,
    pub sentence_selection_f1: f64,
    pub ape_f1: f64,
    pub avg_month_error: f64,
    /// `None` when no case had its sentence selected correctly.
    pub duration_accuracy_given_correct_sentence: Option<f64>,
    pub error_breakdown: BTreeMap<ErrorCategory, f64>,
    /// How a missing prediction enters the month error.
    pub missing_prediction_convention: String,
    pub folds: Vec<FoldSummary>,
    pub per_case: Vec<CaseOutcome>,
}

/// Scores per-case predictions against gold labels. Cases without gold are
/// ignored.
pub fn build_report(
    method: &str,
    decisions: &[Decision],
    gold: &BTreeMap<String, CaseGold>,
    predictions: &[CasePrediction],
    lexicon: &Lexicon,
    folds: Vec<FoldSummary>,
) -> EvaluationReport {
    let by_case: BTreeMap<&str, &Decision> = decisions.iter().map(|d| (d.case_id.as_str(), d)).collect();
    let mut predicted_stage1 = BTreeSet::new();
    let mut gold_stage1 = BTreeSet::new();
    let mut selections = BTreeMap::new();
    let mut gold_sets = BTreeMap::new();
    let mut predicted_months = BTreeMap::new();
    let mut gold_months = BTreeMap::new();
    let mut per_case = Vec::new();
    let mut correct_sentence = 0usize;
    let mut correct_duration = 0usize;
    let mut wrong: BTreeMap<ErrorCategory, usize> = BTreeMap::new();
    let mut wrong_total = 0usize;

    let mut preds: Vec<&CasePrediction> = predictions.iter().filter(|p| gold.contains_key(&p.case_id)).collect();
    preds.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    for p in preds {
        let g = &gold[&p.case_id];
        for idx in &p.stage1 {
            predicted_stage1.insert((p.case_id.clone(), *idx));
        }
        for idx in &g.positive {
            gold_stage1.insert((p.case_id.clone(), *idx));
        }
        selections.insert(p.case_id.clone(), p.selected);
        gold_sets.insert(p.case_id.clone(), g.positive.clone());
        predicted_months.insert(p.case_id.clone(), p.months);
        gold_months.insert(p.case_id.clone(), g.months);

        let mut category = None;
        if let Some(sel) = p.selected {
            if g.positive.contains(&sel) {
                correct_sentence += 1;
                if p.months == Some(g.months) {
                    correct_duration += 1;
                }
            } else if let Some(s) = by_case.get(p.case_id.as_str()).and_then(|d| d.sentence(sel)) {
                let c = categorize_error(&s.text, lexicon);
                *wrong.entry(c).or_default() += 1;
                wrong_total += 1;
                category = Some(c);
            }
        }
        per_case.push(CaseOutcome {
            case_id: p.case_id.clone(),
            predicted_index: p.selected,
            gold_indices: g.positive.iter().copied().collect(),
            predicted_months: p.months,
            gold_months: g.months,
            error_category: category,
        });
    }

    let ape = ape_f1_and_error(&predicted_months, &gold_months);
    EvaluationReport {
        method: method.to_string(),
        num_cases: per_case.len(),
        stage1: stage1_prf(&predicted_stage1, &gold_stage1),
        sentence_selection_f1: selection_f1(&selections, &gold_sets),
        ape_f1: ape.ape_f1,
        avg_month_error: ape.avg_month_error,
        duration_accuracy_given_correct_sentence: (correct_sentence > 0)
            .then(|| correct_duration as f64 / correct_sentence as f64),
        error_breakdown: wrong
            .into_iter()
            .map(|(c, n)| (c, n as f64 / wrong_total as f64))
            .collect(),
        missing_prediction_convention: "zero_months".into(),
        folds,
        per_case,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(&str, usize)]) -> BTreeSet<(String, usize)> {
        pairs.iter().map(|(c, i)| (c.to_string(), *i)).collect()
    }

    #[test]
    fn prf_basic() {
        let g = set(&[("a", 1), ("b", 2), ("c", 3)]);
        let perfect = stage1_prf(&g, &g);
        assert_eq!((perfect.precision, perfect.recall, perfect.f1), (1.0, 1.0, 1.0));

        let p = set(&[("a", 1), ("b", 2), ("x", 9)]);
        let g = set(&[("a", 1), ("b", 2), ("c", 3)]);
        let s = stage1_prf(&p, &g);
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);

        let empty = stage1_prf(&BTreeSet::new(), &g);
        assert!(empty.precision_undefined);
        assert_eq!((empty.recall, empty.f1), (0.0, 0.0));

        let no_gold = stage1_prf(&p, &BTreeSet::new());
        assert!(no_gold.recall_undefined);
        assert_eq!(no_gold.recall, 0.0);
    }

    #[test]
    fn selection_hits() {
        let gold: BTreeMap<String, BTreeSet<usize>> =
            (0..100).map(|i| (format!("c{i:03}"), BTreeSet::from([5]))).collect();
        let preds: BTreeMap<String, Option<usize>> = (0..100)
            .map(|i| (format!("c{i:03}"), Some(if i < 68 { 5 } else { 6 })))
            .collect();
        assert!((selection_f1(&preds, &gold) - 0.68).abs() < 1e-12);
        let none: BTreeMap<String, Option<usize>> = gold.keys().map(|k| (k.clone(), None)).collect();
        assert_eq!(selection_f1(&none, &gold), 0.0);
    }

    #[test]
    fn ape_arithmetic() {
        let pred = BTreeMap::from([("a".to_string(), Some(30)), ("b".to_string(), Some(12))]);
        let gold = BTreeMap::from([("a".to_string(), 30), ("b".to_string(), 24)]);
        let s = ape_f1_and_error(&pred, &gold);
        assert_eq!(s.ape_f1, 0.5);
        assert_eq!(s.avg_month_error, 6.0);

        let missing = BTreeMap::from([("a".to_string(), None)]);
        let s = ape_f1_and_error(&missing, &BTreeMap::from([("a".to_string(), 24)]));
        assert_eq!(s.ape_f1, 0.0);
        assert_eq!(s.avg_month_error, 24.0);
    }

    #[test]
    fn cohen_hand_computed() {
        use AgreementLabel::*;
        let a = [Indicative, Indicative, NotIndicative, NotIndicative];
        let b = [Indicative, NotIndicative, Indicative, NotIndicative];
        let k = cohen_kappa(&a, &b).unwrap();
        assert_eq!((k.observed, k.expected, k.kappa), (0.5, 0.5, 0.0));
        assert_eq!(cohen_kappa(&a, &a).unwrap().kappa, 1.0);
        assert!(cohen_kappa(&a, &b[..3]).is_err());
    }

    #[test]
    fn cohen_degenerate() {
        let k = cohen_kappa(&[1, 1, 1], &[1, 1, 1]).unwrap();
        assert!(k.degenerate);
        assert_eq!(k.kappa, 1.0);
    }

    #[test]
    fn fleiss_hand_computed() {
        // Two items, three raters: [A,A,B] and [A,B,B].
        // P_i = (2^2 + 1^2 - 3) / (3*2) = 1/3 each; p_A = p_B = 1/2.
        // kappa = (1/3 - 1/2) / (1 - 1/2) = -1/3
        let r = vec![
            vec![Some('A'), Some('A'), Some('B')],
            vec![Some('A'), Some('B'), Some('B')],
        ];
        let k = fleiss_kappa(&r, &['A', 'B']).unwrap();
        assert!((k.kappa + 1.0 / 3.0).abs() < 1e-12);

        let missing = vec![vec![Some('A'), None, Some('B')]];
        assert!(fleiss_kappa(&missing, &['A', 'B']).is_err());

        let unanimous = vec![vec![Some('A'); 3]; 4];
        let k = fleiss_kappa(&unanimous, &['A', 'B']).unwrap();
        assert!(k.degenerate);
        assert_eq!(k.kappa, 1.0);
    }

    #[test]
    fn histogram_basic() {
        let mk = |m: Option<u32>| ExtractionResult {
            months: m,
            ..ExtractionResult::empty("x")
        };
        let h = punishment_histogram(&[mk(Some(6)), mk(Some(6)), mk(Some(30))], 12).unwrap();
        assert_eq!(
            h.buckets,
            vec![
                HistogramBucket { start: 0, end: 11, count: 2 },
                HistogramBucket { start: 24, end: 35, count: 1 },
            ]
        );
        assert_eq!(h.median, Some(6.0));
        assert!(h.to_csv().starts_with("bucket_start,bucket_end,count\n0,11,2\n"));

        let h = punishment_histogram(&[mk(Some(12)), mk(Some(36)), mk(Some(60)), mk(None)], 12).unwrap();
        assert_eq!(h.median, Some(36.0));
        assert_eq!(h.total, 3);

        let empty = punishment_histogram(&[], 12).unwrap();
        assert!(empty.buckets.is_empty());
        assert_eq!(empty.median, None);
        assert!(punishment_histogram(&[], 0).is_err());
    }

    #[test]
    fn taxonomy_examples() {
        let l = Lexicon::default_hebrew();
        assert_eq!(categorize_error("בנוסף, 18 חודשי מאסר על תנאי.", &l), ErrorCategory::Probation);
        assert_eq!(
            categorize_error("(ת\"פ 1124/04) נגזרו עליו 12 חודשי מאסר בפועל.", &l),
            ErrorCategory::PriorCaseReference
        );
        assert_eq!(
            categorize_error("קנס בסך 5,000 ש\"ח או 30 ימי מאסר תמורתו.", &l),
            ErrorCategory::Fine
        );
        assert_eq!(categorize_error("המאסר יחל ביום 31.", &l), ErrorCategory::Procedural);
        assert_eq!(categorize_error("המאסר ירוצה בבית הסוהר.", &l), ErrorCategory::Misc);
    }
}
