//! Cross-validates the rule-based pipeline and both learners on the bundled
//! synthetic corpus and prints the headline metrics.
//!
//!     cargo run --release --example evaluate_corpus

use std::path::Path;

use ape::corpus::{load_annotations, load_corpus_dir};
use ape::extraction::ExtractionConfig;
use ape::lexicon::Lexicon;
use ape::supervised::{cross_validate, CVConfig, Method, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
    let corpus = load_corpus_dir(&dir)?;
    let annotations = load_annotations(&dir.join("annotations.jsonl"))?;
    let lexicon = Lexicon::default_hebrew();
    let config = CVConfig::default();

    println!("{:<11} {:>6} {:>6} {:>6} {:>8} {:>7} {:>8}", "method", "P", "R", "F1", "Sent F1", "APE F1", "Avg err");
    for method in [
        Method::RuleBased,
        Method::Supervised(ModelKind::LinearMargin),
        Method::Supervised(ModelKind::TreeEnsemble),
    ] {
        let r = cross_validate(&corpus.decisions, &annotations, &lexicon, method, &config, &ExtractionConfig::default())?;
        println!(
            "{:<11} {:>6.2} {:>6.2} {:>6.2} {:>8.2} {:>7.2} {:>8.2}",
            r.method, r.stage1.precision, r.stage1.recall, r.stage1.f1, r.sentence_selection_f1, r.ape_f1, r.avg_month_error
        );
        for case in r.per_case.iter().filter(|c| c.error_category.is_some() || c.predicted_months != Some(c.gold_months)) {
            println!(
                "    {} predicted {:?} ({:?} months), gold {:?} ({} months), {:?}",
                case.case_id, case.predicted_index, case.predicted_months, case.gold_indices, case.gold_months, case.error_category
            );
        }
    }
    Ok(())
}
