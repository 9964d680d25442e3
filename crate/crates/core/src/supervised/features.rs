use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Decision, Sentence};
use crate::lexicon::{match_tiers_text, Lexicon, Tier};
use crate::numbers::{all_spans, NumberOptions};
use crate::text;

/// Bumped whenever [`FEATURE_NAMES`] changes order or meaning.
pub const FEATURE_SCHEMA_VERSION: u32 = 1;

pub const FEATURE_NAMES: [&str; 13] = [
    "strong_positive",
    "moderate_positive",
    "moderate_negative",
    "strong_negative",
    "has_number",
    "has_time_unit",
    "number_count",
    "fine_marker_count",
    "probation_marker_count",
    "docket_marker_count",
    "relative_position",
    "token_count",
    "distance_to_document_end",
];

pub const NUM_FEATURES: usize = FEATURE_NAMES.len();

static DOCKET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+/\d+").unwrap());

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema_version: u32,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        let i = FEATURE_NAMES.iter().position(|n| *n == name)?;
        self.values.get(i).copied()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Features of one sentence in the context of its decision. The token count
/// is scaled by the longest sentence of the same decision.
pub fn featurize(sentence: &Sentence, decision: &Decision, lexicon: &Lexicon) -> FeatureVector {
    let hits = match_tiers_text(&sentence.text, lexicon);
    let spans = all_spans(&sentence.text, &lexicon.numerals, &NumberOptions::default());
    let has_unit = text::normalized_tokens(&sentence.text)
        .iter()
        .any(|t| lexicon.numerals.is_unit_word(t));
    let docket = DOCKET.find_iter(&sentence.text).count();
    let max_tokens = decision.sentences.iter().map(|s| s.token_count).max().unwrap_or(0);
    let token_norm = if max_tokens == 0 {
        0.0
    } else {
        sentence.token_count as f64 / max_tokens as f64
    };
    let mut values = Vec::with_capacity(NUM_FEATURES);
    for t in Tier::ALL {
        values.push(hits.count(t) as f64);
    }
    values.extend([
        f64::from(u8::from(!spans.is_empty())),
        f64::from(u8::from(has_unit)),
        spans.len() as f64,
        lexicon.fine_markers.count_in(&sentence.text) as f64,
        lexicon.probation_markers.count_in(&sentence.text) as f64,
        docket as f64,
        sentence.relative_position,
        token_norm,
        1.0 - sentence.relative_position,
    ]);
    FeatureVector {
        schema_version: FEATURE_SCHEMA_VERSION,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_positions() {
        let l = Lexicon::default_hebrew();
        let d = Decision::from_text(
            "c",
            "הנאשם הודה. אני מחליט, אני גוזר על הנאשם 30 חודשי מאסר בפועל. סוף.",
        );
        let fv = featurize(&d.sentences[1], &d, &l);
        assert_eq!(fv.values.len(), NUM_FEATURES);
        assert_eq!(fv.get("strong_positive"), Some(2.0));
        assert_eq!(fv.get("has_number"), Some(1.0));
        assert_eq!(fv.get("has_time_unit"), Some(1.0));
        assert_eq!(fv.get("token_count"), Some(1.0));

        let last = featurize(&d.sentences[2], &d, &l);
        assert_eq!(last.get("relative_position"), Some(1.0));
        assert_eq!(last.get("distance_to_document_end"), Some(0.0));
    }

    #[test]
    fn empty_sentence() {
        let l = Lexicon::default_hebrew();
        let d = Decision::from_text("c", "");
        let s = Sentence {
            index: 0,
            text: String::new(),
            token_count: 0,
            relative_position: 0.0,
        };
        let fv = featurize(&s, &d, &l);
        assert!(fv.is_finite());
        assert!(fv.values[..10].iter().all(|v| *v == 0.0));
        assert_eq!(fv.get("distance_to_document_end"), Some(1.0));
    }
}
