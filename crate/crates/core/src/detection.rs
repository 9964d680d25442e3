//! Rule-based selection of the sentence carrying the actual imprisonment.
//!
//! Candidates are the sentences containing a filter keyword. Each candidate
//! gets the weighted sum of its tier hits plus structural terms: a bonus for
//! a number together with a time unit, a penalty for a number with no time
//! unit (procedural orders), and a penalty for fine markers. The document's
//! highest-scoring candidate at or above the lexicon threshold is selected.

use serde::Serialize;

use crate::corpus::{Decision, Sentence};
use crate::lexicon::{match_tiers_text, Lexicon, StructureWeights, TierHits};
use crate::numbers::{all_spans, NumberOptions};
use crate::text;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredSentence {
    pub sentence_index: usize,
    pub score: f64,
    pub tier_hits: TierHits,
    pub has_number: bool,
    pub has_time_unit: bool,
    pub fine_hits: usize,
}

impl ScoredSentence {
    /// Recomputes the score from the stored fields.
    pub fn recompute(&self, structure: &StructureWeights) -> f64 {
        let mut score = self.tier_hits.weighted_sum();
        if self.has_number && self.has_time_unit {
            score += structure.number_with_unit_bonus;
        }
        if self.has_number && !self.has_time_unit {
            score -= structure.number_without_unit_penalty;
        }
        if self.fine_hits > 0 {
            score -= structure.fine_penalty;
        }
        score
    }
}

/// Sentences with at least one filter keyword, in document order. Empty
/// sentences never qualify.
pub fn filter_candidates<'a>(decision: &'a Decision, lexicon: &Lexicon) -> Vec<&'a Sentence> {
    decision
        .sentences
        .iter()
        .filter(|s| s.token_count > 0 && lexicon.passes_filter(&s.text))
        .collect()
}

pub fn rule_score(sentence: &Sentence, lexicon: &Lexicon) -> ScoredSentence {
    let tier_hits = match_tiers_text(&sentence.text, lexicon);
    let spans = all_spans(&sentence.text, &lexicon.numerals, &NumberOptions::default());
    let has_time_unit = text::normalized_tokens(&sentence.text)
        .iter()
        .any(|t| lexicon.numerals.is_unit_word(t));
    let mut scored = ScoredSentence {
        sentence_index: sentence.index,
        score: 0.0,
        tier_hits,
        has_number: !spans.is_empty(),
        has_time_unit,
        fine_hits: lexicon.fine_markers.count_in(&sentence.text),
    };
    scored.score = scored.recompute(&lexicon.structure);
    scored
}

/// Scores every candidate of a decision.
pub fn score_candidates(decision: &Decision, lexicon: &Lexicon) -> Vec<ScoredSentence> {
    filter_candidates(decision, lexicon)
        .into_iter()
        .map(|s| rule_score(s, lexicon))
        .collect()
}

/// Index of the maximum score; ties go to the later sentence.
pub(crate) fn argmax_latest<I>(items: I) -> Option<usize>
where
    I: IntoIterator<Item = (usize, f64)>,
{
    let mut best: Option<(usize, f64)> = None;
    for (idx, score) in items {
        best = match best {
            Some((bi, bs)) if score < bs || (score == bs && idx < bi) => Some((bi, bs)),
            _ => Some((idx, score)),
        };
    }
    best.map(|(i, _)| i)
}

/// Best candidate at or above the threshold, or `None` when nothing clears it.
pub fn select_sentence_rule_based(decision: &Decision, lexicon: &Lexicon) -> Option<usize> {
    select_scored(&score_candidates(decision, lexicon), lexicon.threshold).map(|s| s.sentence_index)
}

pub(crate) fn select_scored(scored: &[ScoredSentence], threshold: f64) -> Option<&ScoredSentence> {
    let idx = argmax_latest(
        scored
            .iter()
            .filter(|s| s.score >= threshold)
            .map(|s| (s.sentence_index, s.score)),
    )?;
    scored.iter().find(|s| s.sentence_index == idx)
}

/// One line of `detect` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub case_id: String,
    pub sentence_index: Option<usize>,
    pub score: Option<f64>,
    pub text: Option<String>,
}

pub fn detect(decision: &Decision, lexicon: &Lexicon) -> Detection {
    let scored = score_candidates(decision, lexicon);
    let chosen = select_scored(&scored, lexicon.threshold);
    Detection {
        case_id: decision.case_id.clone(),
        sentence_index: chosen.map(|s| s.sentence_index),
        score: chosen.map(|s| s.score),
        text: chosen.and_then(|s| decision.sentence(s.sentence_index).map(|x| x.text.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::segment_sentences;
    use crate::lexicon::Tier;

    fn lex() -> Lexicon {
        Lexicon::default_hebrew()
    }

    fn sent(text: &str) -> Sentence {
        segment_sentences(text).remove(0)
    }

    fn scored(index: usize, score: f64) -> ScoredSentence {
        ScoredSentence {
            sentence_index: index,
            score,
            tier_hits: TierHits::default(),
            has_number: false,
            has_time_unit: false,
            fine_hits: 0,
        }
    }

    #[test]
    fn present_tense_verb_with_duration_clears_threshold() {
        // strong_positive +3, number and unit +2
        let s = rule_score(&sent("אני גוזר על הנאשם 30 חודשי מאסר בפועל."), &lex());
        assert_eq!(s.tier_hits.count(Tier::StrongPositive), 1);
        assert_eq!(s.score, 5.0);
        assert!(s.score >= lex().threshold);
    }

    #[test]
    fn prior_case_reference_falls_below_threshold() {
        // moderate_positive +1 (נגזרו), docket "/" -1, number and unit +2,
        // "ברע"פ" -1  => 1
        let s = rule_score(&sent("ברע\"פ 1049/12 נגזרו על המערער 12 חודשי מאסר בפועל."), &lex());
        assert_eq!(s.score, 1.0);
        assert!(s.score < lex().threshold);
    }

    #[test]
    fn bare_number_without_unit_is_penalized() {
        let s = rule_score(&sent("המאסר בפועל יחל ביום 31."), &lex());
        assert!(s.has_number);
        assert!(!s.has_time_unit);
        assert_eq!(s.score, -2.0);
    }

    #[test]
    fn recompute_matches_score() {
        let l = lex();
        for t in [
            "קנס בסך 5,000 ש\"ח או 30 ימי מאסר תמורתו.",
            "לפיכך, ביקשה המאשימה להשית על הנאשם עונש של מאסר בפועל ממושך.",
        ] {
            let s = rule_score(&sent(t), &l);
            assert_eq!(s.recompute(&l.structure), s.score);
        }
    }

    #[test]
    fn filter_counts() {
        let l = lex();
        let mut text = String::new();
        for i in 0..40 {
            if i % 13 == 5 {
                text.push_str("הוטל עליו מאסר. ");
            } else {
                text.push_str("הנאשם הביע חרטה. ");
            }
        }
        let d = Decision::from_text("c", text);
        assert_eq!(d.sentences.len(), 40);
        assert_eq!(filter_candidates(&d, &l).len(), 3);
        let none = Decision::from_text("c", "אין כאן דבר. גם לא כאן.");
        assert!(filter_candidates(&none, &l).is_empty());
        let all = Decision::from_text("c", "מאסר. מאסר. מאסר.");
        assert_eq!(filter_candidates(&all, &l).len(), 3);
    }

    #[test]
    fn argmax_and_ties() {
        let picks = [scored(3, 5.0), scored(7, 2.5)];
        assert_eq!(select_scored(&picks, 2.0).unwrap().sentence_index, 3);
        let low = [scored(3, 1.0), scored(7, 1.5)];
        assert!(select_scored(&low, 2.0).is_none());
        let tie = [scored(10, 4.0), scored(38, 4.0)];
        assert_eq!(select_scored(&tie, 2.0).unwrap().sentence_index, 38);
        assert_eq!(argmax_latest([(38, 4.0), (10, 4.0)]), Some(38));
    }

    #[test]
    fn selects_verdict_over_distractors() {
        let l = lex();
        let d = Decision::from_text(
            "c",
            "לפיכך, ביקשה המאשימה להשית על הנאשם עונש של מאסר בפועל ממושך. \
             אני גוזר על הנאשם 30 חודשי מאסר בפועל. \
             בנוסף, 18 חודשי מאסר על תנאי. \
             המאסר בפועל יחל ביום 31.",
        );
        assert_eq!(select_sentence_rule_based(&d, &l), Some(1));
        let det = detect(&d, &l);
        assert_eq!(det.score, Some(5.0));
        assert!(det.text.unwrap().contains("גוזר"));
    }
}
