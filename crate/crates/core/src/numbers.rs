//! Number and time-unit recognition in Hebrew sentences.
//!
//! Numbers come from three sources: digit literals (optionally carrying a
//! one-letter prefix such as `ו-18` or `ה-9`), sequences of Hebrew number
//! words composed by [`compose`], and bare unit words that imply a single
//! unit ("year of imprisonment") or two units (the dual forms). Each number
//! is bound to the nearest time-unit word within a small token window.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::lexicon::NumeralLexicon;
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    Month,
    Year,
    Day,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberSource {
    Digits,
    Words,
    UnitOnlyElimination,
}

/// A recognized number. Token indices are whitespace-token positions in the
/// sentence; `end_token` is inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberSpan {
    pub start_token: usize,
    pub end_token: usize,
    pub value: u32,
    pub source: NumberSource,
    pub attached_unit: Option<TimeUnit>,
    /// Tokens strictly between the number and its unit.
    pub unit_distance: usize,
    /// Position of the bound unit word, if any.
    pub unit_token: Option<usize>,
    /// "and a half" follows the number or its unit.
    #[serde(default)]
    pub half: bool,
}

impl NumberSpan {
    /// Duration in months, when the span carries a unit.
    pub fn months(&self) -> Option<u32> {
        let unit = self.attached_unit?;
        Some(if self.half {
            half_to_months(self.value, unit)
        } else {
            to_months(self.value, unit)
        })
    }

    /// Last token covered by the number or its unit.
    pub fn region_end(&self) -> usize {
        self.unit_token.map_or(self.end_token, |u| u.max(self.end_token))
    }

    /// First token covered by the number or its unit.
    pub fn region_start(&self) -> usize {
        self.unit_token.map_or(self.start_token, |u| u.min(self.start_token))
    }
}

/// Converts a duration to whole months. Days convert at 30 per month,
/// rounding half up.
pub fn to_months(value: u32, unit: TimeUnit) -> u32 {
    match unit {
        TimeUnit::Year => value.saturating_mul(12),
        TimeUnit::Month => value,
        TimeUnit::Day => value.saturating_add(15) / 30,
    }
}

/// `value` and a half units, in whole months (rounded half up).
fn half_to_months(value: u32, unit: TimeUnit) -> u32 {
    match unit {
        TimeUnit::Year => value.saturating_mul(12).saturating_add(6),
        TimeUnit::Month => value.saturating_add(1),
        TimeUnit::Day => value.saturating_mul(2).saturating_add(31) / 60,
    }
}

/// Tunables for number recognition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberOptions {
    /// Maximum token offset between a number and the unit it binds to.
    pub attach_window: usize,
    /// Recognize "and a half" after a number or unit.
    pub allow_half: bool,
}

impl Default for NumberOptions {
    fn default() -> Self {
        NumberOptions {
            attach_window: 3,
            allow_half: true,
        }
    }
}

static DIGITS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:[ובלמהשכ]{1,3}[-־]?)?(\d{1,3}(?:,\d{3})+|\d{1,9})(\.5)?$").unwrap()
});

fn parse_digits(token: &str) -> Option<(u32, bool)> {
    let caps = DIGITS.captures(token)?;
    let value = caps[1].replace(',', "").parse().ok()?;
    Some((value, caps.get(2).is_some()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum NumeralClass {
    Unit,
    Teen,
    Ten,
    Hundred,
}

impl NumeralClass {
    fn rank(self) -> u8 {
        match self {
            NumeralClass::Unit | NumeralClass::Teen => 1,
            NumeralClass::Ten => 2,
            NumeralClass::Hundred => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Component {
    value: u32,
    class: NumeralClass,
    conjoined: bool,
}

fn classify(form: &str, numerals: &NumeralLexicon) -> Option<(u32, NumeralClass)> {
    if let Some(v) = numerals.units_words.get(form) {
        return Some((*v, NumeralClass::Unit));
    }
    if let Some(v) = numerals.teens_words.get(form) {
        return Some((*v, NumeralClass::Teen));
    }
    if let Some(v) = numerals.tens_words.get(form) {
        return Some((*v, NumeralClass::Ten));
    }
    numerals
        .hundreds_words
        .get(form)
        .map(|v| (*v, NumeralClass::Hundred))
}

/// Reads one numeral component starting at `pos`; returns it and the number
/// of tokens it spans. Two-token forms (teens, "three hundred") are only
/// tried when the first token does not end a clause.
fn read_component(
    norm: &[String],
    raw: &[&str],
    pos: usize,
    numerals: &NumeralLexicon,
) -> Option<(Component, usize)> {
    let tok = norm.get(pos)?.as_str();
    if tok.is_empty() {
        return None;
    }
    let mut candidates = vec![(tok, false)];
    if let Some(rest) = numerals.strip_conjunction(tok) {
        candidates.push((rest, true));
    }
    for (form, conjoined) in candidates {
        let mk = |(value, class): (u32, NumeralClass)| Component {
            value,
            class,
            conjoined,
        };
        if pos + 1 < norm.len() && !text::ends_clause(raw[pos]) {
            let pair = format!("{form} {}", norm[pos + 1]);
            if let Some(hit) = classify(&pair, numerals) {
                return Some((mk(hit), 2));
            }
        }
        if form.contains(['-', '־']) {
            let spaced = form.replace(['-', '־'], " ");
            if let Some(hit) = classify(&spaced, numerals) {
                return Some((mk(hit), 1));
            }
        }
        if let Some(hit) = classify(form, numerals) {
            return Some((mk(hit), 1));
        }
    }
    None
}

/// Combines parsed components. A lone component stands for itself. Longer
/// sequences must descend strictly (hundreds, tens, then a unit or teen) and
/// carry the conjunction on the last component. A conjunction on the first
/// component links the whole number to what precedes it ("ו-שלוש מאות
/// וחמש") and is ignored.
fn compose_components(comps: &[Component]) -> Option<u32> {
    match comps {
        [] => None,
        [one] => Some(one.value),
        _ => {
            let (last, init) = comps.split_last().unwrap();
            if !last.conjoined || init[1..].iter().any(|c| c.conjoined) {
                return None;
            }
            if comps.windows(2).any(|w| w[0].class.rank() <= w[1].class.rank()) {
                return None;
            }
            Some(comps.iter().map(|c| c.value).sum())
        }
    }
}

/// Value of a sequence of Hebrew number words, or `None` when the tokens are
/// not all numerals or are in an ill-formed order.
pub fn compose<S: AsRef<str>>(word_tokens: &[S], numerals: &NumeralLexicon) -> Option<u32> {
    let raw: Vec<&str> = word_tokens.iter().map(|t| t.as_ref()).collect();
    let norm: Vec<String> = raw.iter().map(|t| text::normalize_token(t)).collect();
    let mut comps = Vec::new();
    let mut pos = 0;
    while pos < norm.len() {
        let (c, len) = read_component(&norm, &raw, pos, numerals)?;
        comps.push(c);
        pos += len;
    }
    compose_components(&comps)
}

/// Renders `value` (1–999) with the canonical spellings of the numeral
/// lexicon: hundreds, then tens, with the conjunction prefixed to the last
/// element.
pub fn render_hebrew(value: u32, numerals: &NumeralLexicon) -> Option<String> {
    if !(1..=999).contains(&value) {
        return None;
    }
    let conj = numerals.canonical_conjunction();
    let mut parts: Vec<String> = Vec::new();
    let hundreds = value / 100 * 100;
    let rest = value % 100;
    if hundreds > 0 {
        parts.push(numerals.canonical(hundreds)?.to_string());
    }
    let mut tail: Vec<String> = Vec::new();
    if (1..20).contains(&rest) {
        tail.push(numerals.canonical(rest)?.to_string());
    } else if rest >= 20 {
        let tens = rest / 10 * 10;
        let units = rest % 10;
        if units == 0 {
            tail.push(numerals.canonical(tens)?.to_string());
        } else {
            parts.push(numerals.canonical(tens)?.to_string());
            tail.push(numerals.canonical(units)?.to_string());
        }
    }
    if !tail.is_empty() {
        if !parts.is_empty() {
            tail[0] = format!("{conj}{}", tail[0]);
        }
        parts.extend(tail);
    }
    Some(parts.join(" "))
}

/// Finds digit literals and number-word sequences, each bound to the nearest
/// unit within the window.
pub fn find_numbers(sentence: &Sentence, numerals: &NumeralLexicon) -> Vec<NumberSpan> {
    find_numbers_in(&sentence.text, numerals, &NumberOptions::default())
}

pub fn find_numbers_in(text_: &str, numerals: &NumeralLexicon, opts: &NumberOptions) -> Vec<NumberSpan> {
    let raw = text::tokens(text_);
    let norm: Vec<String> = raw.iter().map(|t| text::normalize_token(t)).collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < norm.len() {
        if let Some((value, decimal_half)) = parse_digits(&norm[i]) {
            let mut s = bare_span(i, i, value, NumberSource::Digits);
            s.half = decimal_half && opts.allow_half;
            spans.push(s);
            i += 1;
            continue;
        }
        let mut comps: Vec<(Component, usize, usize)> = Vec::new();
        let mut j = i;
        while let Some((c, len)) = read_component(&norm, &raw, j, numerals) {
            comps.push((c, j, j + len - 1));
            j += len;
            if text::ends_clause(raw[j - 1]) {
                break;
            }
        }
        if comps.is_empty() {
            i += 1;
            continue;
        }
        // Longest composable prefix first; a single component always composes.
        let mut k = 0;
        while k < comps.len() {
            let mut take = comps.len() - k;
            let value = loop {
                let slice: Vec<Component> = comps[k..k + take].iter().map(|c| c.0).collect();
                if let Some(v) = compose_components(&slice) {
                    break v;
                }
                take -= 1;
            };
            spans.push(bare_span(
                comps[k].1,
                comps[k + take - 1].2,
                value,
                NumberSource::Words,
            ));
            k += take;
        }
        i = j;
    }
    for span in spans.iter_mut() {
        attach_unit(span, &raw, &norm, numerals, opts);
    }
    spans
}

fn bare_span(start: usize, end: usize, value: u32, source: NumberSource) -> NumberSpan {
    NumberSpan {
        start_token: start,
        end_token: end,
        value,
        source,
        attached_unit: None,
        unit_distance: 0,
        unit_token: None,
        half: false,
    }
}

fn attach_unit(
    span: &mut NumberSpan,
    raw: &[&str],
    norm: &[String],
    numerals: &NumeralLexicon,
    opts: &NumberOptions,
) {
    let unit_at = |p: usize| numerals.time_unit(&norm[p]);
    let mut after = None;
    for d in 1..=opts.attach_window {
        let p = span.end_token + d;
        if p >= norm.len() || text::ends_clause(raw[p - 1]) {
            break;
        }
        if let Some(u) = unit_at(p) {
            after = Some((d, p, u));
            break;
        }
    }
    let mut before = None;
    for d in 1..=opts.attach_window {
        let Some(p) = span.start_token.checked_sub(d) else {
            break;
        };
        if text::ends_clause(raw[p]) {
            break;
        }
        if let Some(u) = unit_at(p) {
            before = Some((d, p, u));
            break;
        }
    }
    let chosen = match (after, before) {
        (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
        (a, b) => a.or(b),
    };
    if let Some((d, p, u)) = chosen {
        span.attached_unit = Some(u);
        span.unit_distance = d - 1;
        span.unit_token = Some(p);
        if opts.allow_half && !span.half {
            let is_half = |q: usize| norm.get(q).is_some_and(|t| numerals.half_words.contains(t));
            span.half = is_half(p + 1) || (p > span.end_token && is_half(span.end_token + 1));
        }
    }
}

/// Spans implied by bare unit words that no number binds: singular forms
/// count as one unit, dual forms as two.
pub fn unit_only_elimination(sentence: &Sentence, numerals: &NumeralLexicon) -> Vec<NumberSpan> {
    unit_only_elimination_in(&sentence.text, numerals, &NumberOptions::default())
}

pub fn unit_only_elimination_in(
    text_: &str,
    numerals: &NumeralLexicon,
    opts: &NumberOptions,
) -> Vec<NumberSpan> {
    let numbers = find_numbers_in(text_, numerals, opts);
    let claimed: BTreeSet<usize> = numbers.iter().filter_map(|s| s.unit_token).collect();
    let norm = text::normalized_tokens(text_);
    let mut out = Vec::new();
    for (i, tok) in norm.iter().enumerate() {
        let (value, unit) = if let Some(u) = numerals.dual_unit_words.get(tok) {
            (2, *u)
        } else if let Some(u) = numerals.unit_only_words.get(tok) {
            if claimed.contains(&i) {
                continue;
            }
            (1, *u)
        } else {
            continue;
        };
        let half = opts.allow_half
            && norm
                .get(i + 1)
                .is_some_and(|t| numerals.half_words.contains(t));
        out.push(NumberSpan {
            start_token: i,
            end_token: i,
            value,
            source: NumberSource::UnitOnlyElimination,
            attached_unit: Some(unit),
            unit_distance: 0,
            unit_token: Some(i),
            half,
        });
    }
    out
}

/// Numbers and unit-only spans together, sorted by position.
pub fn all_spans(text_: &str, numerals: &NumeralLexicon, opts: &NumberOptions) -> Vec<NumberSpan> {
    let mut spans = find_numbers_in(text_, numerals, opts);
    spans.extend(unit_only_elimination_in(text_, numerals, opts));
    spans.sort_by_key(|s| s.start_token);
    spans
}
