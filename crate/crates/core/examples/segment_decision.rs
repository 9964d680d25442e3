//! Splits a short decision into sentences, showing how abbreviations,
//! enumeration labels and dates are handled.

use ape::corpus::{Decision, Segmenter};

fn main() {
    let text = "1. הנאשם הורשע בעבירות מין. ראו למשל עמ' 12 להכרעת הדין. \
                הנאשם יתייצב ביום 12.3.2024 עד השעה 10:00... המאסר בפועל יחל ביום 31. \
                זכות ערעור תוך 45 ימים!";
    let decision = Decision::from_text("demo", text);
    for s in &decision.sentences {
        println!("[{:>2}] pos={:.2} tokens={:>2}  {}", s.index, s.relative_position, s.token_count, s.text);
    }

    // A custom abbreviation keeps "סע." from ending a sentence.
    let mut segmenter = Segmenter::default();
    segmenter.add_abbreviation("סע.");
    for s in segmenter.segment("ראו סע. 4 לעיל. המאסר יחל מחר.") {
        println!("custom: {}", s.text);
    }
}
