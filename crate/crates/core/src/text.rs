//! Token-level helpers shared by the lexicon matcher and the numeral parser.

/// Hebrew points and cantillation marks (niqqud). Stripped before matching so
/// vocalised and unvocalised spellings compare equal.
fn is_niqqud(c: char) -> bool {
    matches!(c, '\u{0591}'..='\u{05BD}' | '\u{05BF}' | '\u{05C1}'..='\u{05C2}' | '\u{05C4}'..='\u{05C5}' | '\u{05C7}')
}

/// Whitespace tokens of a sentence, in order.
pub fn tokens(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Normalized form of a single raw token: niqqud removed, surrounding
/// punctuation trimmed, Latin letters lower-cased. Internal punctuation
/// (gershayim, slashes, hyphens) is kept.
pub fn normalize_token(raw: &str) -> String {
    let stripped: String = raw.chars().filter(|c| !is_niqqud(*c)).collect();
    stripped
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Normalized tokens of a sentence.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(normalize_token).collect()
}

/// True when the raw token carries trailing clause punctuation, which ends a
/// run of number words.
pub fn ends_clause(raw: &str) -> bool {
    raw.trim_end_matches(|c: char| matches!(c, '"' | '\'' | '״' | '׳' | ')' | ']'))
        .ends_with([',', '.', ';', ':', '!', '?'])
}

/// True when the string is made only of non-alphanumeric characters, e.g. a
/// docket-marker slash or a currency sign.
pub fn is_symbol_entry(surface: &str) -> bool {
    !surface.is_empty() && surface.chars().all(|c| !c.is_alphanumeric() && !c.is_whitespace())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_strips_edges_only() {
        assert_eq!(normalize_token("\"גוזר,"), "גוזר");
        assert_eq!(normalize_token("ש\"ח."), "ש\"ח");
        assert_eq!(normalize_token("1124/04."), "1124/04");
        assert_eq!(normalize_token("(ת\"פ"), "ת\"פ");
        assert_eq!(normalize_token("..."), "");
    }

    #[test]
    fn niqqud_is_removed() {
        // shin with shin-dot, qamats etc.
        assert_eq!(normalize_token("שָׁנָה"), "שנה");
    }

    #[test]
    fn clause_endings() {
        assert!(ends_clause("חודשים,"));
        assert!(ends_clause("31."));
        assert!(!ends_clause("ושמונה"));
    }
}
