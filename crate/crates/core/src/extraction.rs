//! Duration extraction from a selected sentence.
//!
//! First the total/actual/conditional decomposition is tried: when exactly
//! three duration-bearing numbers appear and the first equals the sum of the
//! other two, the second is the actual term. Otherwise every duration-bearing
//! number is scored locally and the best one wins.

use serde::{Deserialize, Serialize};

use crate::corpus::Decision;
use crate::detection::argmax_latest;
use crate::lexicon::{Lexicon, PhraseSet};
use crate::numbers::{all_spans, NumberOptions, NumberSpan};
use crate::text;

/// Weights of the per-number score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DurationWeights {
    /// Scaled by `1 / (1 + tokens between number and unit)`.
    pub unit_proximity: f64,
    pub actual_marker: f64,
    pub and_rest_marker: f64,
    pub probation_penalty: f64,
    pub fine_penalty: f64,
    /// Scaled by the relative token position of the number in its sentence.
    pub position_bonus: f64,
    /// Maximum tokens between a number's region and a marker it receives.
    pub marker_window: usize,
}

impl Default for DurationWeights {
    fn default() -> Self {
        DurationWeights {
            unit_proximity: 3.0,
            actual_marker: 2.0,
            and_rest_marker: 1.0,
            probation_penalty: 2.5,
            fine_penalty: 2.5,
            position_bonus: 0.5,
            marker_window: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub numbers: NumberOptions,
    pub weights: DurationWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCandidate {
    pub total: NumberSpan,
    pub actual: NumberSpan,
    pub conditional: NumberSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMethod {
    Decomposition,
    Scored,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub case_id: String,
    pub sentence_index: Option<usize>,
    pub months: Option<u32>,
    pub method: ExtractionMethod,
    /// Every span found in the sentence, duration-bearing or not.
    pub candidates: Vec<NumberSpan>,
    /// Spans without a time unit, excluded from decomposition and scoring.
    pub ignored_unitless: usize,
}

impl ExtractionResult {
    pub fn empty(case_id: &str) -> Self {
        ExtractionResult {
            case_id: case_id.to_string(),
            sentence_index: None,
            months: None,
            method: ExtractionMethod::None,
            candidates: Vec::new(),
            ignored_unitless: 0,
        }
    }
}

/// The decomposition triple, when the sentence has exactly three
/// duration-bearing spans and the first is the sum of the other two.
pub fn find_decomposition(spans: &[NumberSpan]) -> Option<DecompositionCandidate> {
    let durations: Vec<&NumberSpan> = spans.iter().filter(|s| s.months().is_some()).collect();
    let [z, x, y] = durations.as_slice() else {
        return None;
    };
    let (zm, xm, ym) = (z.months()?, x.months()?, y.months()?);
    (xm.checked_add(ym) == Some(zm)).then(|| DecompositionCandidate {
        total: (*z).clone(),
        actual: (*x).clone(),
        conditional: (*y).clone(),
    })
}

/// Months of the actual term under the decomposition rule.
pub fn try_decomposition(spans: &[NumberSpan]) -> Option<u32> {
    find_decomposition(spans).and_then(|c| c.actual.months())
}

/// Marker contributions: each occurrence goes to the closest preceding
/// duration span within the window, else to the closest following one.
fn marker_scores(
    markers: &PhraseSet,
    raw: &[&str],
    norm: &[String],
    spans: &[&NumberSpan],
    window: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; spans.len()];
    for m in markers.find(raw, norm) {
        let preceding = spans
            .iter()
            .enumerate()
            .filter(|(_, s)| s.region_end() < m.start_token)
            .map(|(i, s)| (i, m.start_token - s.region_end() - 1))
            .filter(|(_, gap)| *gap <= window)
            .min_by_key(|(_, gap)| *gap);
        let following = || {
            spans
                .iter()
                .enumerate()
                .filter(|(_, s)| s.region_start() >= m.end_token)
                .map(|(i, s)| (i, s.region_start() - m.end_token))
                .filter(|(_, gap)| *gap <= window)
                .min_by_key(|(_, gap)| *gap)
        };
        if let Some((i, gap)) = preceding.or_else(following) {
            out[i] += 1.0 / (1.0 + gap as f64);
        }
    }
    out
}

/// Per-span scores for the duration-bearing spans, in order.
pub fn duration_scores(
    sentence_text: &str,
    spans: &[NumberSpan],
    lexicon: &Lexicon,
    weights: &DurationWeights,
) -> Vec<(NumberSpan, f64)> {
    let durations: Vec<&NumberSpan> = spans.iter().filter(|s| s.months().is_some()).collect();
    if durations.is_empty() {
        return Vec::new();
    }
    let raw = text::tokens(sentence_text);
    let norm: Vec<String> = raw.iter().map(|t| text::normalize_token(t)).collect();
    let w = weights.marker_window;
    let actual = marker_scores(&lexicon.actual_markers, &raw, &norm, &durations, w);
    let rest = marker_scores(&lexicon.and_rest_markers, &raw, &norm, &durations, w);
    let probation = marker_scores(&lexicon.probation_markers, &raw, &norm, &durations, w);
    let fine = marker_scores(&lexicon.fine_markers, &raw, &norm, &durations, w);
    let last = raw.len().saturating_sub(1).max(1) as f64;
    durations
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let score = weights.unit_proximity / (1.0 + s.unit_distance as f64)
                + weights.actual_marker * actual[i]
                + weights.and_rest_marker * rest[i]
                - weights.probation_penalty * probation[i]
                - weights.fine_penalty * fine[i]
                + weights.position_bonus * s.start_token as f64 / last;
            ((*s).clone(), score)
        })
        .collect()
}

/// Months of the best-scoring duration span; ties go to the later span.
/// `None` when no span carries a unit.
pub fn score_duration_candidates(
    sentence_text: &str,
    spans: &[NumberSpan],
    lexicon: &Lexicon,
    weights: &DurationWeights,
) -> Option<u32> {
    let scored = duration_scores(sentence_text, spans, lexicon, weights);
    let best = argmax_latest(scored.iter().enumerate().map(|(i, (_, sc))| (i, *sc)))?;
    scored[best].0.months()
}

/// Extracts the actual term from `sentence_index` of `decision`.
pub fn extract(
    decision: &Decision,
    sentence_index: Option<usize>,
    lexicon: &Lexicon,
    config: &ExtractionConfig,
) -> ExtractionResult {
    let Some(sentence) = sentence_index.and_then(|i| decision.sentence(i)) else {
        return ExtractionResult::empty(&decision.case_id);
    };
    let spans = all_spans(&sentence.text, &lexicon.numerals, &config.numbers);
    let ignored_unitless = spans.iter().filter(|s| s.attached_unit.is_none()).count();
    let (months, method) = match try_decomposition(&spans) {
        Some(m) => (Some(m), ExtractionMethod::Decomposition),
        None => match score_duration_candidates(&sentence.text, &spans, lexicon, &config.weights) {
            Some(m) => (Some(m), ExtractionMethod::Scored),
            None => (None, ExtractionMethod::None),
        },
    };
    ExtractionResult {
        case_id: decision.case_id.clone(),
        sentence_index: Some(sentence.index),
        months,
        method,
        candidates: spans,
        ignored_unitless,
    }
}

/// Spans of free text with the default options; convenience for callers
/// that only have a sentence string.
pub fn spans_of(sentence_text: &str, lexicon: &Lexicon) -> Vec<NumberSpan> {
    all_spans(sentence_text, &lexicon.numerals, &NumberOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{NumberSource, TimeUnit};

    fn lex() -> Lexicon {
        Lexicon::default_hebrew()
    }

    fn month_span(pos: usize, value: u32) -> NumberSpan {
        NumberSpan {
            start_token: pos,
            end_token: pos,
            value,
            source: NumberSource::Digits,
            attached_unit: Some(TimeUnit::Month),
            unit_distance: 0,
            unit_token: Some(pos + 1),
            half: false,
        }
    }

    #[test]
    fn decomposition_cases() {
        let ok = [month_span(0, 48), month_span(5, 30), month_span(10, 18)];
        assert_eq!(try_decomposition(&ok), Some(30));
        let bad = [month_span(0, 40), month_span(5, 30), month_span(10, 18)];
        assert_eq!(try_decomposition(&bad), None);
        assert_eq!(try_decomposition(&[month_span(0, 12)]), None);
    }

    #[test]
    fn decomposition_ignores_unitless_spans() {
        let mut docket = month_span(0, 1124);
        docket.attached_unit = None;
        docket.unit_token = None;
        let spans = [docket, month_span(2, 48), month_span(5, 30), month_span(10, 18)];
        assert_eq!(try_decomposition(&spans), Some(30));
    }

    #[test]
    fn worked_example_sentence() {
        let l = lex();
        let d = Decision::from_text(
            "c1",
            "אני גוזר על הנאשם 48 חודשי מאסר, מתוכם ירצה הנאשם 30 חודשי מאסר בפועל והיתרה, 18 חודשים, על תנאי.",
        );
        let r = extract(&d, Some(0), &l, &ExtractionConfig::default());
        assert_eq!(r.months, Some(30));
        assert_eq!(r.method, ExtractionMethod::Decomposition);
    }

    #[test]
    fn single_span_with_actual_marker() {
        let l = lex();
        let t = "נגזרו עליו 12 חודשי מאסר בפועל.";
        let spans = spans_of(t, &l);
        assert_eq!(score_duration_candidates(t, &spans, &l, &DurationWeights::default()), Some(12));
    }

    #[test]
    fn actual_beats_probation() {
        // Hand evaluation with the default weights, tokens:
        // 0 אני 1 גוזר 2 על 3 הנאשם 4 30 5 חודשי 6 מאסר 7 בפועל
        // 8 ו-18 9 חודשי 10 מאסר 11 על 12 תנאי.
        // 30: unit 3/1 + actual 2*(1/(1+1)) + position 0.5*4/12 = 4 + 1/6
        // 18: unit 3/1 - probation 2.5*(1/(1+1)) + position 0.5*8/12 = 1.75 + 1/3
        let l = lex();
        let t = "אני גוזר על הנאשם 30 חודשי מאסר בפועל ו-18 חודשי מאסר על תנאי.";
        let spans = spans_of(t, &l);
        let scored = duration_scores(t, &spans, &l, &DurationWeights::default());
        assert_eq!(scored.len(), 2);
        assert!((scored[0].1 - (4.0 + 1.0 / 6.0)).abs() < 1e-12);
        assert!((scored[1].1 - (1.75 + 1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(score_duration_candidates(t, &spans, &l, &DurationWeights::default()), Some(30));
    }

    #[test]
    fn unitless_only_yields_none() {
        let l = lex();
        let t = "כאמור בת\"פ 1124/04 ובעמוד 17.";
        let spans = spans_of(t, &l);
        assert_eq!(score_duration_candidates(t, &spans, &l, &DurationWeights::default()), None);
    }

    #[test]
    fn bare_unit_sentence() {
        let l = lex();
        let d = Decision::from_text("c", "אני גוזר על הנאשם שנת מאסר בפועל.");
        let r = extract(&d, Some(0), &l, &ExtractionConfig::default());
        assert_eq!(r.months, Some(12));
        assert_eq!(r.method, ExtractionMethod::Scored);
    }

    #[test]
    fn no_sentence_no_months() {
        let d = Decision::from_text("c", "טקסט.");
        let r = extract(&d, None, &lex(), &ExtractionConfig::default());
        assert_eq!(r.months, None);
        assert_eq!(r.method, ExtractionMethod::None);
        assert_eq!(r.sentence_index, None);
    }

    #[test]
    fn ties_go_to_later_span() {
        let l = lex();
        let w = DurationWeights {
            position_bonus: 0.0,
            ..DurationWeights::default()
        };
        let t = "6 חודשים או 9 חודשים";
        let spans = spans_of(t, &l);
        assert_eq!(score_duration_candidates(t, &spans, &l, &w), Some(9));
    }
}
