//! Extracts the actual term from verdict sentences, showing whether the
//! total = actual + conditional rule or the local scores decided.

use ape::corpus::Decision;
use ape::extraction::{duration_scores, extract, spans_of, DurationWeights, ExtractionConfig};
use ape::lexicon::Lexicon;

fn main() {
    let lexicon = Lexicon::default_hebrew();
    let config = ExtractionConfig::default();
    let sentences = [
        "אני מטיל על הנאשם את העונש הבא: 48 חודשי מאסר, מתוכם ירצה הנאשם 30 חודשי מאסר בפועל והיתרה, 18 חודשים, יהיו מאסר על תנאי.",
        "אני גוזר על הנאשם 30 חודשי מאסר בפועל ו-18 חודשי מאסר על תנאי.",
        "אני גוזר על הנאשם שנה וחצי מאסר בפועל.",
        "אני גוזר על הנאשם ארבע שנות מאסר בפועל.",
    ];
    for text in sentences {
        let decision = Decision::from_text("demo", text);
        let result = extract(&decision, Some(0), &lexicon, &config);
        println!("{text}\n  -> {:?} months via {:?}", result.months, result.method);
        let spans = spans_of(text, &lexicon);
        for (span, score) in duration_scores(text, &spans, &lexicon, &DurationWeights::default()) {
            println!("     {:>3} {:?}: score {score:.3}", span.value, span.attached_unit);
        }
    }
}
