//! Parses Hebrew number words and digit forms, attaches time units and
//! converts them to months.
//!
//!     cargo run --example hebrew_numerals -- "עשרים ושמונה חודשי מאסר"

use ape::lexicon::Lexicon;
use ape::numbers::{all_spans, compose, render_hebrew, NumberOptions};

fn main() {
    let lexicon = Lexicon::default_hebrew();
    let numerals = &lexicon.numerals;

    for v in [7, 18, 28, 118, 350, 999] {
        let words = render_hebrew(v, numerals).expect("1..=999 renders");
        let tokens: Vec<&str> = words.split_whitespace().collect();
        println!("{v:>4} -> {words} -> {:?}", compose(&tokens, numerals));
    }

    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let samples = if inputs.is_empty() {
        vec![
            "אני גוזר על הנאשם שלוש שנים וחצי מאסר בפועל.".to_string(),
            "נגזרה עליו שנת מאסר בפועל.".to_string(),
            "20 שנה מאסר.".to_string(),
            "שנתיים מאסר ו-90 ימי מאסר.".to_string(),
            "קנס בסך 5,000 ש\"ח.".to_string(),
        ]
    } else {
        inputs
    };
    for text in samples {
        println!("\n{text}");
        for span in all_spans(&text, numerals, &NumberOptions::default()) {
            println!(
                "  tokens {}..={}  value {:>3}  unit {:<6} half {:<5} months {:?}  ({:?})",
                span.start_token,
                span.end_token,
                span.value,
                span.attached_unit.map(|u| format!("{u:?}")).unwrap_or_else(|| "-".into()),
                span.half,
                span.months(),
                span.source
            );
        }
    }
}
