//! Decisions, sentences, annotations and corpus statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ApeError, Result};
use crate::lexicon::Lexicon;

/// Upper bound accepted for an annotated term, in months.
pub const MAX_ANNOTATED_MONTHS: u32 = 1200;

/// One segmented sentence of a decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub token_count: usize,
    pub relative_position: f64,
}

impl Sentence {
    pub fn tokens(&self) -> Vec<&str> {
        self.text.split_whitespace().collect()
    }
}

/// One sentencing decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub case_id: String,
    pub year: i32,
    pub court: String,
    pub raw_text: String,
    pub sentences: Vec<Sentence>,
}

impl Decision {
    /// Builds a decision, segmenting `raw_text` with the default segmenter.
    pub fn new(case_id: impl Into<String>, year: i32, court: impl Into<String>, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let sentences = segment_sentences(&raw_text);
        Decision {
            case_id: case_id.into(),
            year,
            court: court.into(),
            raw_text,
            sentences,
        }
    }

    /// Shorthand for tests and examples: a decision with placeholder metadata.
    pub fn from_text(case_id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        Decision::new(case_id, 0, "", raw_text)
    }

    pub fn sentence(&self, index: usize) -> Option<&Sentence> {
        self.sentences.get(index)
    }
}

// ---------------------------------------------------------------------------
// Segmentation

const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "vs.", "v.", "mr.", "mrs.", "ms.", "dr.", "no.", "p.", "pp.", "sec.",
    "art.", "para.", "cf.", "עמ'.", "עמ.", "ס.", "סע.", "פס.", "מס.", "ת.ז.", "ת.פ.", "ע.פ.", "בע.פ.",
    "בת.פ.", "כב.", "עו.ד.",
];

/// Rule-based sentence splitter.
///
/// Splits after `.`, `?` or `!` (optionally followed by closing quotes or
/// brackets) when whitespace or the end of text follows. A single period
/// does not split after a listed abbreviation or after an enumeration label
/// opening a sentence ("3.", "א."); a run of two or more periods (ellipsis)
/// never splits. Periods inside tokens, as in decimals, dates and docket
/// numbers, are never followed by whitespace and so never split.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: BTreeSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '״' | '׳' | '”' | '’' | '»')
}

fn is_enumeration_label(token: &str) -> bool {
    let Some(body) = token.strip_suffix('.') else {
        return false;
    };
    let n = body.chars().count();
    (1..=3).contains(&n) && body.chars().all(|c| c.is_ascii_digit())
        || (1..=2).contains(&n) && body.chars().all(|c| ('\u{05D0}'..='\u{05EA}').contains(&c))
}

impl Segmenter {
    pub fn with_abbreviations<'a>(abbrevs: impl IntoIterator<Item = &'a str>) -> Self {
        Segmenter {
            abbreviations: abbrevs.into_iter().map(|a| a.trim().to_lowercase()).collect(),
        }
    }

    pub fn add_abbreviation(&mut self, abbrev: &str) {
        self.abbreviations.insert(abbrev.trim().to_lowercase());
    }

    pub fn segment(&self, raw_text: &str) -> Vec<Sentence> {
        let mut pieces: Vec<&str> = Vec::new();
        let chars: Vec<(usize, char)> = raw_text.char_indices().collect();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let (_, c) = chars[i];
            if !matches!(c, '.' | '?' | '!') {
                i += 1;
                continue;
            }
            let run_start = i;
            let mut j = i;
            while j < chars.len() && matches!(chars[j].1, '.' | '?' | '!') {
                j += 1;
            }
            let run: String = chars[run_start..j].iter().map(|(_, c)| *c).collect();
            while j < chars.len() && is_closer(chars[j].1) {
                j += 1;
            }
            let end_byte = chars.get(j).map_or(raw_text.len(), |(b, _)| *b);
            let at_boundary = j == chars.len() || chars[j].1.is_whitespace();
            i = j.max(i + 1);
            if !at_boundary || run.chars().filter(|c| *c == '.').count() >= 2 {
                continue;
            }
            if run == "." && self.suppresses_period(raw_text, start, chars[run_start].0) {
                continue;
            }
            let piece = raw_text[start..end_byte].trim();
            if !piece.is_empty() {
                pieces.push(piece);
            }
            start = end_byte;
        }
        let tail = raw_text[start..].trim();
        if !tail.is_empty() {
            pieces.push(tail);
        }
        let n = pieces.len();
        pieces
            .into_iter()
            .enumerate()
            .map(|(index, text)| Sentence {
                index,
                text: text.to_string(),
                token_count: text.split_whitespace().count(),
                relative_position: if n > 1 { index as f64 / (n - 1) as f64 } else { 0.0 },
            })
            .collect()
    }

    /// Whether the period at byte `dot` (inside the sentence starting at
    /// `sentence_start`) belongs to an abbreviation or enumeration label.
    fn suppresses_period(&self, text: &str, sentence_start: usize, dot: usize) -> bool {
        let before = &text[sentence_start..dot];
        let token_start = before
            .rfind(char::is_whitespace)
            .map(|p| p + before[p..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(0);
        let token = format!("{}.", &before[token_start..]);
        let bare = token
            .trim_start_matches(|c: char| matches!(c, '(' | '[' | '"' | '\'' | '״'))
            .to_lowercase();
        if self.abbreviations.contains(&bare) {
            return true;
        }
        before[..token_start].trim().is_empty() && is_enumeration_label(&bare)
    }
}

/// Splits text into sentences with the default abbreviation list.
pub fn segment_sentences(raw_text: &str) -> Vec<Sentence> {
    Segmenter::default().segment(raw_text)
}

// ---------------------------------------------------------------------------
// Corpus loading

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetadataEntry {
    pub filename: String,
    pub case_id: String,
    pub year: i32,
    pub court: String,
}

/// A file that could not be read; loading continues past it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileError {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusLoad {
    pub decisions: Vec<Decision>,
    pub errors: Vec<FileError>,
}

pub fn load_metadata(path: &Path) -> Result<Vec<MetadataEntry>> {
    let raw = std::fs::read_to_string(path).map_err(|e| ApeError::io(path, e))?;
    serde_json::from_str(&raw).map_err(|e| ApeError::Parse {
        what: format!("metadata {}", path.display()),
        message: e.to_string(),
    })
}

/// Reads a file as UTF-8, reporting the first invalid byte offset.
pub fn read_utf8(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| ApeError::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| ApeError::InvalidUtf8 {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })
}

/// Loads every `.txt` file in `dir` as a decision, taking metadata from the
/// sidecar file. Unreadable or non-UTF-8 files are reported in
/// [`CorpusLoad::errors`]; a file with no metadata entry fails the load.
pub fn load_corpus(dir: &Path, metadata_path: &Path) -> Result<CorpusLoad> {
    let metadata = load_metadata(metadata_path)?;
    let by_file: HashMap<&str, &MetadataEntry> =
        metadata.iter().map(|m| (m.filename.as_str(), m)).collect();

    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| ApeError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    files.sort();

    let mut out = CorpusLoad::default();
    let mut ids = BTreeSet::new();
    for path in files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let meta = by_file
            .get(name.as_str())
            .ok_or_else(|| ApeError::MissingMetadata(name.clone()))?;
        if meta.case_id.trim().is_empty() {
            return Err(ApeError::Parse {
                what: "metadata".into(),
                message: format!("empty case_id for {name}"),
            });
        }
        if !ids.insert(meta.case_id.clone()) {
            return Err(ApeError::DuplicateCase(meta.case_id.clone()));
        }
        match read_utf8(&path) {
            Ok(text) => out.decisions.push(Decision::new(
                meta.case_id.clone(),
                meta.year,
                meta.court.clone(),
                text,
            )),
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                out.errors.push(FileError {
                    path: path.clone(),
                    message: e.to_string(),
                });
            }
        }
    }
    out.decisions.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    Ok(out)
}

/// Loads a corpus directory whose metadata sits at `DIR/metadata.json`.
pub fn load_corpus_dir(dir: &Path) -> Result<CorpusLoad> {
    load_corpus(dir, &dir.join("metadata.json"))
}

// ---------------------------------------------------------------------------
// Annotations

/// One sentence-level annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub case_id: String,
    pub sentence_index: usize,
    pub is_punishment: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub months: Option<u32>,
}

#[derive(Deserialize)]
struct RawAnnotation {
    case_id: String,
    sentence_index: usize,
    is_punishment: bool,
    #[serde(default)]
    months: Option<i64>,
}

/// Parses line-delimited annotation records. Duplicate
/// `(case_id, sentence_index)` keys keep the last record.
pub fn parse_annotations(input: &str) -> Result<Vec<AnnotationRecord>> {
    let mut records: Vec<AnnotationRecord> = Vec::new();
    let mut positions: HashMap<(String, usize), usize> = HashMap::new();
    for (lineno, line) in input.lines().enumerate() {
        let line_no = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawAnnotation = serde_json::from_str(line).map_err(|e| ApeError::Annotation {
            line: line_no,
            message: e.to_string(),
        })?;
        let months = match (raw.is_punishment, raw.months) {
            (false, Some(_)) => {
                return Err(ApeError::Annotation {
                    line: line_no,
                    message: "months given for a non-punishment sentence".into(),
                })
            }
            (true, None) => {
                return Err(ApeError::Annotation {
                    line: line_no,
                    message: "punishment sentence without months".into(),
                })
            }
            (_, Some(m)) if m < 0 => {
                return Err(ApeError::Annotation {
                    line: line_no,
                    message: format!("negative months {m}"),
                })
            }
            (_, Some(m)) if m > MAX_ANNOTATED_MONTHS as i64 => {
                return Err(ApeError::Annotation {
                    line: line_no,
                    message: format!("months {m} above cap {MAX_ANNOTATED_MONTHS}"),
                })
            }
            (_, m) => m.map(|m| m as u32),
        };
        let rec = AnnotationRecord {
            case_id: raw.case_id,
            sentence_index: raw.sentence_index,
            is_punishment: raw.is_punishment,
            months,
        };
        let key = (rec.case_id.clone(), rec.sentence_index);
        match positions.get(&key) {
            Some(&pos) => {
                log::warn!(
                    "line {line_no}: duplicate annotation for {} sentence {}, keeping the later one",
                    key.0,
                    key.1
                );
                records[pos] = rec;
            }
            None => {
                positions.insert(key, records.len());
                records.push(rec);
            }
        }
    }
    Ok(records)
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let raw = read_utf8(path)?;
    parse_annotations(&raw)
}

/// Gold labels of one case, derived from its annotation records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CaseGold {
    pub positive: BTreeSet<usize>,
    pub labels: BTreeMap<usize, bool>,
    /// Months of the earliest positive sentence; 0 when the case has none.
    pub months: u32,
}

pub fn gold_by_case(records: &[AnnotationRecord]) -> BTreeMap<String, CaseGold> {
    let mut out: BTreeMap<String, CaseGold> = BTreeMap::new();
    for r in records {
        let g = out.entry(r.case_id.clone()).or_default();
        g.labels.insert(r.sentence_index, r.is_punishment);
        if r.is_punishment {
            g.positive.insert(r.sentence_index);
        }
    }
    for (case_id, g) in out.iter_mut() {
        g.months = g
            .positive
            .iter()
            .find_map(|idx| {
                records
                    .iter()
                    .find(|r| &r.case_id == case_id && r.sentence_index == *idx)
                    .and_then(|r| r.months)
            })
            .unwrap_or(0);
    }
    out
}

// ---------------------------------------------------------------------------
// Statistics and pre-labeling

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub num_cases: usize,
    pub num_sentences: usize,
    pub num_words: usize,
    pub sentence_length_mean: f64,
    pub sentence_length_std: f64,
    pub sentence_length_min: usize,
    pub sentence_length_max: usize,
}

/// Population statistics of sentence lengths (in tokens).
pub fn corpus_stats(decisions: &[Decision]) -> CorpusStats {
    let lengths: Vec<usize> = decisions
        .iter()
        .flat_map(|d| d.sentences.iter().map(|s| s.token_count))
        .collect();
    if lengths.is_empty() {
        return CorpusStats {
            num_cases: decisions.len(),
            ..CorpusStats::default()
        };
    }
    let n = lengths.len() as f64;
    let total: usize = lengths.iter().sum();
    let mean = total as f64 / n;
    let var = lengths.iter().map(|&l| (l as f64 - mean).powi(2)).sum::<f64>() / n;
    CorpusStats {
        num_cases: decisions.len(),
        num_sentences: lengths.len(),
        num_words: total,
        sentence_length_mean: mean,
        sentence_length_std: var.sqrt(),
        sentence_length_min: *lengths.iter().min().unwrap(),
        sentence_length_max: *lengths.iter().max().unwrap(),
    }
}

/// Marks each sentence as an automatic negative when it contains no filter
/// keyword. Sentences that are not auto-negative are left for manual labels.
pub fn prelabel_negatives(decision: &Decision, lexicon: &Lexicon) -> Vec<(usize, bool)> {
    decision
        .sentences
        .iter()
        .map(|s| (s.index, !lexicon.passes_filter(&s.text)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &[Sentence]) -> Vec<&str> {
        s.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn plain_splitting() {
        let s = segment_sentences("A. B? C!");
        assert_eq!(texts(&s), ["A.", "B?", "C!"]);
        assert_eq!(s[2].relative_position, 1.0);
        assert_eq!(s[1].relative_position, 0.5);
    }

    #[test]
    fn docket_number_does_not_split() {
        let s = segment_sentences("נקבע בת\"פ 1124/04. לאחר מכן נשמעו הטיעונים");
        assert_eq!(texts(&s), ["נקבע בת\"פ 1124/04.", "לאחר מכן נשמעו הטיעונים"]);
        let s = segment_sentences("See CrimC 1124/04. More prose follows here.");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "See CrimC 1124/04.");
    }

    #[test]
    fn no_terminal_punctuation_is_one_sentence() {
        let s = segment_sentences("טקסט ללא סימן פיסוק בסופו");
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].relative_position, 0.0);
        assert_eq!(s[0].token_count, 5);
    }

    #[test]
    fn decimals_abbreviations_ellipsis() {
        let s = segment_sentences("The rate is 3.5 percent e.g. here. Next (...) one.");
        assert_eq!(texts(&s), ["The rate is 3.5 percent e.g. here.", "Next (...) one."]);
    }

    #[test]
    fn enumeration_label_joins_its_sentence() {
        let s = segment_sentences("1. הנאשם הורשע. 2. הנאשם הודה.");
        assert_eq!(texts(&s), ["1. הנאשם הורשע.", "2. הנאשם הודה."]);
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        let s = segment_sentences("He said \"stop.\" Then left.");
        assert_eq!(texts(&s), ["He said \"stop.\"", "Then left."]);
    }

    #[test]
    fn empty_input() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences(" \n ").is_empty());
    }

    #[test]
    fn annotations_parse_and_validate() {
        let ok = r#"{"case_id":"c1","sentence_index":7,"is_punishment":true,"months":30}
{"case_id":"c1","sentence_index":2,"is_punishment":false}"#;
        let recs = parse_annotations(ok).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].months, Some(30));
        assert_eq!(recs[1].months, None);

        let bad = r#"{"case_id":"c1","sentence_index":3,"is_punishment":false,"months":12}"#;
        assert!(parse_annotations(bad).is_err());
        let neg = r#"{"case_id":"c1","sentence_index":3,"is_punishment":true,"months":-4}"#;
        assert!(parse_annotations(neg).unwrap_err().to_string().contains("negative"));
    }

    #[test]
    fn duplicate_annotation_last_wins() {
        let input = r#"{"case_id":"c1","sentence_index":3,"is_punishment":false}
{"case_id":"c1","sentence_index":4,"is_punishment":false}
{"case_id":"c1","sentence_index":3,"is_punishment":true,"months":6}"#;
        let recs = parse_annotations(input).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].sentence_index, 3);
        assert!(recs[0].is_punishment);
    }

    #[test]
    fn gold_takes_earliest_positive() {
        let recs = parse_annotations(
            r#"{"case_id":"a","sentence_index":9,"is_punishment":true,"months":6}
{"case_id":"a","sentence_index":4,"is_punishment":true,"months":30}
{"case_id":"b","sentence_index":1,"is_punishment":false}"#,
        )
        .unwrap();
        let gold = gold_by_case(&recs);
        assert_eq!(gold["a"].months, 30);
        assert_eq!(gold["a"].positive.len(), 2);
        assert_eq!(gold["b"].months, 0);
        assert!(gold["b"].positive.is_empty());
    }

    #[test]
    fn stats_arithmetic() {
        let d = Decision::from_text("c", "a b c. d e f g h.");
        let st = corpus_stats(&[d]);
        assert_eq!(st.num_sentences, 2);
        assert_eq!(st.sentence_length_mean, 4.0);
        assert_eq!(st.sentence_length_min, 3);
        assert_eq!(st.sentence_length_max, 5);
        assert_eq!(st.num_words, 8);

        let flat = corpus_stats(&[Decision::from_text("c", "a b. c d. e f.")]);
        assert_eq!(flat.sentence_length_std, 0.0);

        let empty = corpus_stats(&[]);
        assert_eq!(empty, CorpusStats::default());
    }

    #[test]
    fn prelabel_marks_keywordless_sentences() {
        let lex = Lexicon::default_hebrew();
        let d = Decision::from_text(
            "c",
            "הנאשם הביע חרטה. אני גוזר על הנאשם 30 חודשי מאסר בפועל.",
        );
        assert_eq!(prelabel_negatives(&d, &lex), vec![(0, true), (1, false)]);
    }
}
