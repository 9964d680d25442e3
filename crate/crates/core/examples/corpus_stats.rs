//! Loads a corpus directory and prints size and sentence length statistics,
//! plus the histogram of rule-based extracted terms.
//!
//!     cargo run --example corpus_stats -- [CORPUS_DIR]

use std::path::PathBuf;

use ape::corpus::{corpus_stats, load_corpus_dir};
use ape::detection::select_sentence_rule_based;
use ape::evaluation::punishment_histogram;
use ape::extraction::{extract, ExtractionConfig};
use ape::lexicon::Lexicon;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic"));
    let loaded = load_corpus_dir(&dir)?;
    for e in &loaded.errors {
        eprintln!("skipped {}: {}", e.path.display(), e.message);
    }
    println!("{}", serde_json::to_string_pretty(&corpus_stats(&loaded.decisions))?);

    let lexicon = Lexicon::default_hebrew();
    let results: Vec<_> = loaded
        .decisions
        .iter()
        .map(|d| extract(d, select_sentence_rule_based(d, &lexicon), &lexicon, &ExtractionConfig::default()))
        .collect();
    let hist = punishment_histogram(&results, 12)?;
    println!("median {:?} months, share at most 15 months {:?}", hist.median, hist.fraction_at_most_15_months);
    print!("{}", hist.to_csv());
    Ok(())
}
