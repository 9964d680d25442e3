//! Tiered keyword lists and the numeral lexicon.
//!
//! The lexicon is data: a JSON document with one array per scoring tier,
//! marker lists used by the structural rules, the time-unit words, and a
//! `numerals` section describing Hebrew cardinal numbers. A default Hebrew
//! lexicon is bundled with the crate and can be replaced wholesale.
//!
//! Word entries match whole normalized tokens (multi-word entries match
//! consecutive tokens). Entries made only of symbols, such as the docket
//! slash or brackets, match anywhere inside a token and are counted per
//! occurrence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{ApeError, Result};
use crate::numbers::TimeUnit;
use crate::text;

const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.json");

/// The four scored keyword tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    StrongPositive,
    ModeratePositive,
    ModerateNegative,
    StrongNegative,
}

impl Tier {
    pub const ALL: [Tier; 4] = [
        Tier::StrongPositive,
        Tier::ModeratePositive,
        Tier::ModerateNegative,
        Tier::StrongNegative,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::StrongPositive => "strong_positive",
            Tier::ModeratePositive => "moderate_positive",
            Tier::ModerateNegative => "moderate_negative",
            Tier::StrongNegative => "strong_negative",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One lexicon entry after normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Phrase {
    pub surface: String,
    tokens: Vec<String>,
    pub weight: f64,
    symbol: bool,
}

/// A single phrase occurrence, in whitespace-token coordinates (`end` exclusive).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhraseMatch {
    pub surface: String,
    pub start_token: usize,
    pub end_token: usize,
    pub weight: f64,
}

/// A set of phrases matched as a unit. Matching is greedy, longest entry
/// first, and non-overlapping within the set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhraseSet {
    entries: Vec<Phrase>,
}

impl PhraseSet {
    fn build(entries: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (surface, weight) in entries {
            let surface = surface.trim().to_string();
            if surface.is_empty() || !seen.insert(surface.clone()) {
                continue;
            }
            let symbol = text::is_symbol_entry(&surface);
            let tokens = if symbol {
                Vec::new()
            } else {
                text::normalized_tokens(&surface)
            };
            if !symbol && tokens.iter().any(|t| t.is_empty()) {
                continue;
            }
            out.push(Phrase {
                surface,
                tokens,
                weight,
                symbol,
            });
        }
        out.sort_by(|a, b| b.tokens.len().cmp(&a.tokens.len()));
        PhraseSet { entries: out }
    }

    fn from_words(words: &[String]) -> Self {
        Self::build(words.iter().map(|w| (w.clone(), 1.0)))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Phrase] {
        &self.entries
    }

    /// Matching keys used for disjointness checks.
    fn keys(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .map(|p| {
                if p.symbol {
                    p.surface.clone()
                } else {
                    p.tokens.join(" ")
                }
            })
            .collect()
    }

    /// All occurrences in a sentence given its raw and normalized tokens.
    pub fn find(&self, raw: &[&str], norm: &[String]) -> Vec<PhraseMatch> {
        let mut out = Vec::new();
        for p in self.entries.iter().filter(|p| p.symbol) {
            for (i, tok) in raw.iter().enumerate() {
                for _ in tok.matches(p.surface.as_str()) {
                    out.push(PhraseMatch {
                        surface: p.surface.clone(),
                        start_token: i,
                        end_token: i + 1,
                        weight: p.weight,
                    });
                }
            }
        }
        let words: Vec<&Phrase> = self.entries.iter().filter(|p| !p.symbol).collect();
        let mut i = 0;
        while i < norm.len() {
            let hit = words.iter().find(|p| {
                let n = p.tokens.len();
                i + n <= norm.len() && norm[i..i + n].iter().zip(&p.tokens).all(|(a, b)| a == b)
            });
            match hit {
                Some(p) => {
                    out.push(PhraseMatch {
                        surface: p.surface.clone(),
                        start_token: i,
                        end_token: i + p.tokens.len(),
                        weight: p.weight,
                    });
                    i += p.tokens.len();
                }
                None => i += 1,
            }
        }
        out.sort_by_key(|m| (m.start_token, m.end_token));
        out
    }

    /// Matches in free text.
    pub fn find_in(&self, sentence_text: &str) -> Vec<PhraseMatch> {
        let raw = text::tokens(sentence_text);
        let norm: Vec<String> = raw.iter().map(|t| text::normalize_token(t)).collect();
        self.find(&raw, &norm)
    }

    pub fn count_in(&self, sentence_text: &str) -> usize {
        self.find_in(sentence_text).len()
    }

    pub fn contained_in(&self, sentence_text: &str) -> bool {
        self.count_in(sentence_text) > 0
    }
}

/// Weights for the structural score terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureWeights {
    pub number_with_unit_bonus: f64,
    pub number_without_unit_penalty: f64,
    pub fine_penalty: f64,
}

impl Default for StructureWeights {
    fn default() -> Self {
        StructureWeights {
            number_with_unit_bonus: 2.0,
            number_without_unit_penalty: 2.0,
            fine_penalty: 2.0,
        }
    }
}

/// Hebrew cardinal numerals, time-unit words and the related morphology.
///
/// All keys are stored normalized; multi-word forms (teens, hundreds above
/// 200) are stored with single spaces between words.
#[derive(Debug, Clone, PartialEq)]
pub struct NumeralLexicon {
    pub units_words: BTreeMap<String, u32>,
    pub teens_words: BTreeMap<String, u32>,
    pub tens_words: BTreeMap<String, u32>,
    pub hundreds_words: BTreeMap<String, u32>,
    /// Conjunction prefixes ("and-"), longest first.
    pub conjunction_forms: Vec<String>,
    /// Bare unit forms that denote a single unit when no number binds them.
    pub unit_only_words: BTreeMap<String, TimeUnit>,
    /// Dual forms ("two years") that carry the value 2 themselves.
    pub dual_unit_words: BTreeMap<String, TimeUnit>,
    /// Every unit word a number may bind to.
    pub time_units: BTreeMap<String, TimeUnit>,
    /// "and a half" words.
    pub half_words: BTreeSet<String>,
    canonical: BTreeMap<u32, String>,
}

impl NumeralLexicon {
    /// Canonical (first listed) spelling for a value that has its own entry:
    /// 1–19, the tens and the hundreds.
    pub fn canonical(&self, value: u32) -> Option<&str> {
        self.canonical.get(&value).map(String::as_str)
    }

    /// Canonical conjunction prefix.
    pub fn canonical_conjunction(&self) -> &str {
        self.conjunction_forms
            .iter()
            .min_by_key(|c| c.chars().count())
            .map(String::as_str)
            .unwrap_or("ו")
    }

    /// Value of a single (possibly multi-word) numeral form of any class.
    pub fn lookup(&self, form: &str) -> Option<u32> {
        self.units_words
            .get(form)
            .or_else(|| self.teens_words.get(form))
            .or_else(|| self.tens_words.get(form))
            .or_else(|| self.hundreds_words.get(form))
            .copied()
    }

    /// Every listed spelling with its value.
    pub fn all_forms(&self) -> impl Iterator<Item = (&str, u32)> {
        self.units_words
            .iter()
            .chain(&self.teens_words)
            .chain(&self.tens_words)
            .chain(&self.hundreds_words)
            .map(|(k, v)| (k.as_str(), *v))
    }

    pub fn time_unit(&self, normalized: &str) -> Option<TimeUnit> {
        self.time_units.get(normalized).copied()
    }

    /// True for any unit-bearing word, including the dual forms.
    pub fn is_unit_word(&self, normalized: &str) -> bool {
        self.time_units.contains_key(normalized) || self.dual_unit_words.contains_key(normalized)
    }

    /// Strips a leading conjunction form, returning the remainder when
    /// something is left.
    pub fn strip_conjunction<'a>(&self, token: &'a str) -> Option<&'a str> {
        self.conjunction_forms.iter().find_map(|c| {
            token
                .strip_prefix(c.as_str())
                .filter(|rest| !rest.is_empty())
        })
    }
}

/// Per-tier keyword hits for one sentence.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TierHits {
    pub counts: [usize; 4],
    pub weighted: [f64; 4],
    pub matches: Vec<(Tier, PhraseMatch)>,
}

impl TierHits {
    pub fn count(&self, tier: Tier) -> usize {
        self.counts[tier.index()]
    }

    pub fn weighted_sum(&self) -> f64 {
        self.weighted.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|c| *c == 0)
    }
}

/// A validated lexicon. Immutable after loading.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub version: u32,
    pub threshold: f64,
    pub structure: StructureWeights,
    pub filter_keywords: PhraseSet,
    tiers: [PhraseSet; 4],
    pub past_tense_markers: PhraseSet,
    pub fine_markers: PhraseSet,
    pub probation_markers: PhraseSet,
    pub actual_markers: PhraseSet,
    pub and_rest_markers: PhraseSet,
    pub numerals: NumeralLexicon,
}

#[derive(Debug, Deserialize)]
struct TierWeightsFile {
    strong_positive: Option<f64>,
    moderate_positive: Option<f64>,
    moderate_negative: Option<f64>,
    strong_negative: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct EntryFile {
    surface: String,
    weight: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct NumberFormsFile {
    value: u32,
    forms: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct NumeralsFile {
    units_words: Option<Vec<NumberFormsFile>>,
    teens_words: Option<Vec<NumberFormsFile>>,
    tens_words: Option<Vec<NumberFormsFile>>,
    hundreds_words: Option<Vec<NumberFormsFile>>,
    conjunction_forms: Option<Vec<String>>,
    unit_only_words: Option<BTreeMap<String, TimeUnit>>,
    #[serde(default)]
    dual_unit_words: BTreeMap<String, TimeUnit>,
    #[serde(default)]
    half_words: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct LexiconFile {
    #[serde(default = "default_version")]
    version: u32,
    threshold: Option<f64>,
    tier_weights: Option<TierWeightsFile>,
    structure: Option<StructureWeights>,
    filter_keywords: Option<Vec<String>>,
    strong_positive: Option<Vec<EntryFile>>,
    moderate_positive: Option<Vec<EntryFile>>,
    moderate_negative: Option<Vec<EntryFile>>,
    strong_negative: Option<Vec<EntryFile>>,
    #[serde(default)]
    past_tense_markers: Vec<String>,
    fine_markers: Option<Vec<String>>,
    probation_markers: Option<Vec<String>>,
    #[serde(default)]
    actual_markers: Vec<String>,
    #[serde(default)]
    and_rest_markers: Vec<String>,
    time_units: Option<BTreeMap<String, TimeUnit>>,
    numerals: Option<NumeralsFile>,
}

fn default_version() -> u32 {
    1
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| ApeError::Lexicon(format!("missing required section `{name}`")))
}

fn normalize_form(form: &str) -> String {
    text::normalized_tokens(form)
        .into_iter()
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn numeral_map(
    name: &str,
    groups: Vec<NumberFormsFile>,
    range: impl Fn(u32) -> bool,
    seen: &mut BTreeMap<String, u32>,
    canonical: &mut BTreeMap<u32, String>,
) -> Result<BTreeMap<String, u32>> {
    let mut map = BTreeMap::new();
    for group in groups {
        if !range(group.value) {
            return Err(ApeError::Lexicon(format!(
                "numerals.{name}: value {} out of range",
                group.value
            )));
        }
        if group.forms.is_empty() {
            return Err(ApeError::Lexicon(format!(
                "numerals.{name}: value {} has no forms",
                group.value
            )));
        }
        for (i, form) in group.forms.iter().enumerate() {
            let key = normalize_form(form);
            if key.is_empty() {
                return Err(ApeError::Lexicon(format!("numerals.{name}: empty form")));
            }
            if let Some(prev) = seen.insert(key.clone(), group.value) {
                if prev != group.value {
                    return Err(ApeError::Lexicon(format!(
                        "numeral form `{form}` maps to both {prev} and {}",
                        group.value
                    )));
                }
            }
            if i == 0 && canonical.insert(group.value, key.clone()).is_some() {
                return Err(ApeError::Lexicon(format!(
                    "numerals.{name}: value {} listed twice",
                    group.value
                )));
            }
            map.insert(key, group.value);
        }
    }
    Ok(map)
}

fn unit_map(m: BTreeMap<String, TimeUnit>) -> BTreeMap<String, TimeUnit> {
    m.into_iter()
        .map(|(k, v)| (normalize_form(&k), v))
        .filter(|(k, _)| !k.is_empty())
        .collect()
}

impl NumeralLexicon {
    fn from_file(file: NumeralsFile, time_units: BTreeMap<String, TimeUnit>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut canonical = BTreeMap::new();
        let units_words = numeral_map(
            "units_words",
            required(file.units_words, "numerals.units_words")?,
            |v| (1..=10).contains(&v),
            &mut seen,
            &mut canonical,
        )?;
        let teens_words = numeral_map(
            "teens_words",
            required(file.teens_words, "numerals.teens_words")?,
            |v| (11..=19).contains(&v),
            &mut seen,
            &mut canonical,
        )?;
        let tens_words = numeral_map(
            "tens_words",
            required(file.tens_words, "numerals.tens_words")?,
            |v| (20..=90).contains(&v) && v % 10 == 0,
            &mut seen,
            &mut canonical,
        )?;
        let hundreds_words = numeral_map(
            "hundreds_words",
            required(file.hundreds_words, "numerals.hundreds_words")?,
            |v| (100..=900).contains(&v) && v % 100 == 0,
            &mut seen,
            &mut canonical,
        )?;
        let mut conjunction_forms: Vec<String> =
            required(file.conjunction_forms, "numerals.conjunction_forms")?
                .into_iter()
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty())
                .collect();
        if conjunction_forms.is_empty() {
            return Err(ApeError::Lexicon("numerals.conjunction_forms is empty".into()));
        }
        conjunction_forms.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        conjunction_forms.dedup();
        Ok(NumeralLexicon {
            units_words,
            teens_words,
            tens_words,
            hundreds_words,
            conjunction_forms,
            unit_only_words: unit_map(required(file.unit_only_words, "numerals.unit_only_words")?),
            dual_unit_words: unit_map(file.dual_unit_words),
            time_units,
            half_words: file.half_words.iter().map(|w| normalize_form(w)).collect(),
            canonical,
        })
    }
}

fn tier_entries(entries: Vec<EntryFile>, default: f64) -> PhraseSet {
    PhraseSet::build(
        entries
            .into_iter()
            .map(|e| (e.surface, e.weight.unwrap_or(default))),
    )
}

impl Lexicon {
    /// The bundled Hebrew lexicon.
    pub fn default_hebrew() -> Self {
        Self::from_json_str(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    /// Raw text of the bundled lexicon file.
    pub fn default_json() -> &'static str {
        DEFAULT_LEXICON
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: LexiconFile = serde_json::from_str(json).map_err(|e| ApeError::Parse {
            what: "lexicon".into(),
            message: e.to_string(),
        })?;
        Self::from_file(file)
    }

    fn from_file(file: LexiconFile) -> Result<Self> {
        let tw = file.tier_weights.unwrap_or(TierWeightsFile {
            strong_positive: None,
            moderate_positive: None,
            moderate_negative: None,
            strong_negative: None,
        });
        let tiers = [
            tier_entries(
                required(file.strong_positive, "strong_positive")?,
                tw.strong_positive.unwrap_or(3.0),
            ),
            tier_entries(
                required(file.moderate_positive, "moderate_positive")?,
                tw.moderate_positive.unwrap_or(1.0),
            ),
            tier_entries(
                required(file.moderate_negative, "moderate_negative")?,
                tw.moderate_negative.unwrap_or(-1.0),
            ),
            tier_entries(
                required(file.strong_negative, "strong_negative")?,
                tw.strong_negative.unwrap_or(-3.0),
            ),
        ];
        let time_units = unit_map(required(file.time_units, "time_units")?);
        let numerals = NumeralLexicon::from_file(required(file.numerals, "numerals")?, time_units)?;
        let lexicon = Lexicon {
            version: file.version,
            threshold: file.threshold.unwrap_or(2.0),
            structure: file.structure.unwrap_or_default(),
            filter_keywords: PhraseSet::from_words(&required(file.filter_keywords, "filter_keywords")?),
            tiers,
            past_tense_markers: PhraseSet::from_words(&file.past_tense_markers),
            fine_markers: PhraseSet::from_words(&required(file.fine_markers, "fine_markers")?),
            probation_markers: PhraseSet::from_words(&required(
                file.probation_markers,
                "probation_markers",
            )?),
            actual_markers: PhraseSet::from_words(&file.actual_markers),
            and_rest_markers: PhraseSet::from_words(&file.and_rest_markers),
            numerals,
        };
        lexicon.validate()?;
        Ok(lexicon)
    }

    fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(ApeError::Lexicon("threshold must be finite".into()));
        }
        if self.filter_keywords.is_empty() {
            return Err(ApeError::Lexicon("filter_keywords is empty".into()));
        }
        // Pairwise disjointness of the scored tiers.
        let keys: Vec<BTreeSet<String>> = self.tiers.iter().map(PhraseSet::keys).collect();
        let mut overlaps = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                for k in keys[a].intersection(&keys[b]) {
                    overlaps.push(format!("`{k}` in {} and {}", Tier::ALL[a], Tier::ALL[b]));
                }
            }
        }
        if !overlaps.is_empty() {
            return Err(ApeError::Lexicon(format!(
                "overlapping tiers: {}",
                overlaps.join("; ")
            )));
        }
        // strong_positive > moderate_positive > 0 > moderate_negative > strong_negative
        let bounds = |t: Tier| -> Option<(f64, f64)> {
            let ws = self.tiers[t.index()].entries.iter().map(|p| p.weight);
            ws.fold(None, |acc, w| match acc {
                None => Some((w, w)),
                Some((lo, hi)) => Some((lo.min(w), hi.max(w))),
            })
        };
        let sp = bounds(Tier::StrongPositive);
        let mp = bounds(Tier::ModeratePositive);
        let mn = bounds(Tier::ModerateNegative);
        let sn = bounds(Tier::StrongNegative);
        let bad = |msg: &str| Err(ApeError::Lexicon(format!("weight order violated: {msg}")));
        if let Some((lo, _)) = mp {
            if lo <= 0.0 {
                return bad("moderate_positive weights must be > 0");
            }
        }
        if let Some((_, hi)) = mn {
            if hi >= 0.0 {
                return bad("moderate_negative weights must be < 0");
            }
        }
        if let (Some((lo, _)), Some((_, hi))) = (sp, mp) {
            if lo <= hi {
                return bad("strong_positive must exceed moderate_positive");
            }
        }
        if let (Some((lo, _)), Some((_, hi))) = (mn, sn) {
            if lo <= hi {
                return bad("moderate_negative must exceed strong_negative");
            }
        }
        if let Some((lo, _)) = sp {
            if lo <= 0.0 {
                return bad("strong_positive weights must be > 0");
            }
        }
        if let Some((_, hi)) = sn {
            if hi >= 0.0 {
                return bad("strong_negative weights must be < 0");
            }
        }
        Ok(())
    }

    pub fn tier(&self, tier: Tier) -> &PhraseSet {
        &self.tiers[tier.index()]
    }

    pub fn time_units(&self) -> &BTreeMap<String, TimeUnit> {
        &self.numerals.time_units
    }

    /// True if the text contains at least one filter keyword.
    pub fn passes_filter(&self, sentence_text: &str) -> bool {
        self.filter_keywords.contained_in(sentence_text)
    }

    /// Counts of docket markers (the symbol entries and docket-prefix words
    /// of the moderate-negative tier).
    pub fn docket_marker_count(&self, sentence_text: &str) -> usize {
        self.tier(Tier::ModerateNegative).count_in(sentence_text)
    }
}

/// Loads and validates a lexicon file.
pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let raw = std::fs::read_to_string(path).map_err(|e| ApeError::io(path, e))?;
    Lexicon::from_json_str(&raw)
}

/// Tier counts and matched spans for a sentence.
pub fn match_tiers(sentence: &Sentence, lexicon: &Lexicon) -> TierHits {
    match_tiers_text(&sentence.text, lexicon)
}

pub(crate) fn match_tiers_text(sentence_text: &str, lexicon: &Lexicon) -> TierHits {
    let raw = text::tokens(sentence_text);
    let norm: Vec<String> = raw.iter().map(|t| text::normalize_token(t)).collect();
    let mut hits = TierHits::default();
    for tier in Tier::ALL {
        for m in lexicon.tier(tier).find(&raw, &norm) {
            hits.counts[tier.index()] += 1;
            hits.weighted[tier.index()] += m.weight;
            hits.matches.push((tier, m));
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::default_hebrew()
    }

    fn modified(f: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_LEXICON).unwrap();
        f(&mut v);
        v.to_string()
    }

    #[test]
    fn bundled_lexicon_loads() {
        let l = lex();
        assert_eq!(l.threshold, 2.0);
        assert!(l.tier(Tier::StrongPositive).len() > 5);
        assert_eq!(l.numerals.canonical(8), Some("שמונה"));
        assert_eq!(l.numerals.canonical(300), Some("שלוש מאות"));
        assert_eq!(l.numerals.time_unit("חודשים"), Some(TimeUnit::Month));
    }

    #[test]
    fn overlapping_tiers_rejected() {
        let json = modified(|v| {
            v["strong_negative"]
                .as_array_mut()
                .unwrap()
                .push(serde_json::json!({"surface": "גוזר"}));
        });
        let err = Lexicon::from_json_str(&json).unwrap_err().to_string();
        assert!(err.contains("overlapping"), "{err}");
        assert!(err.contains("גוזר"), "{err}");
    }

    #[test]
    fn missing_time_units_rejected() {
        let json = modified(|v| {
            v.as_object_mut().unwrap().remove("time_units");
        });
        let err = Lexicon::from_json_str(&json).unwrap_err().to_string();
        assert!(err.contains("time_units"), "{err}");
    }

    #[test]
    fn weight_order_enforced() {
        let json = modified(|v| {
            v["moderate_positive"]
                .as_array_mut()
                .unwrap()
                .push(serde_json::json!({"surface": "חדש", "weight": 5.0}));
        });
        assert!(Lexicon::from_json_str(&json).is_err());
    }

    #[test]
    fn conflicting_numeral_values_rejected() {
        let json = modified(|v| {
            v["numerals"]["units_words"][0]["forms"]
                .as_array_mut()
                .unwrap()
                .push(serde_json::json!("שמונה"));
        });
        let err = Lexicon::from_json_str(&json).unwrap_err().to_string();
        assert!(err.contains("maps to both"), "{err}");
    }

    #[test]
    fn strong_positive_hit() {
        let hits = match_tiers_text("אני גוזר על הנאשם 30 חודשי מאסר בפועל.", &lex());
        assert_eq!(hits.count(Tier::StrongPositive), 1);
        assert_eq!(hits.count(Tier::StrongNegative), 0);
        assert_eq!(hits.weighted_sum(), 3.0);
    }

    #[test]
    fn docket_slash_matches_inside_token() {
        let hits = match_tiers_text("כך נקבע בעניין 1049/12 הנזכר", &lex());
        assert_eq!(hits.count(Tier::ModerateNegative), 1);
        let (tier, m) = &hits.matches[0];
        assert_eq!(*tier, Tier::ModerateNegative);
        assert_eq!(m.start_token, 3);
    }

    #[test]
    fn empty_sentence_has_no_hits() {
        assert!(match_tiers_text("", &lex()).is_empty());
        assert!(match_tiers_text("   ", &lex()).is_empty());
    }

    #[test]
    fn multiword_marker_is_one_hit() {
        let l = lex();
        assert_eq!(l.probation_markers.count_in("18 חודשי מאסר על תנאי."), 1);
        assert_eq!(l.fine_markers.count_in("קנס בסך 5,000 ש\"ח"), 2);
    }
}
