//! Trains both learners on the bundled synthetic corpus, saves the models
//! and ranks the candidates of one decision.
//!
//!     cargo run --release --example train_supervised -- [MODEL_DIR]

use std::path::{Path, PathBuf};

use ape::corpus::{gold_by_case, load_annotations, load_corpus_dir};
use ape::lexicon::Lexicon;
use ape::supervised::{
    candidate_probabilities, stage1_classify, stage2_argmax, train, training_records, CVConfig, ModelKind,
    TrainedModel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let corpus = load_corpus_dir(&data)?;
    let gold = gold_by_case(&load_annotations(&data.join("annotations.jsonl"))?);
    let lexicon = Lexicon::default_hebrew();
    let config = CVConfig::default();

    // Hold out the last decision for the demonstration.
    let (train_docs, held_out) = corpus.decisions.split_at(corpus.decisions.len() - 1);
    let records = training_records(train_docs, &gold, &lexicon);
    let positives = records.iter().filter(|(_, y)| *y).count();
    println!("{} training sentences, {positives} positive", records.len());

    let doc = &held_out[0];
    for kind in [ModelKind::LinearMargin, ModelKind::TreeEnsemble] {
        let model = train(&records, kind, &config)?;
        let path = out.join(format!("ape-{}.json", kind.short_name()));
        std::fs::write(&path, model.to_json())?;
        let reloaded = TrainedModel::from_json(&std::fs::read_to_string(&path)?)?;

        println!("\n{kind:?} (saved to {})", path.display());
        if let Some(cal) = reloaded.calibration {
            println!("  calibration a={:.3} b={:.3}", cal.a, cal.b);
        }
        let mut probs = candidate_probabilities(&reloaded, doc, &lexicon)?;
        probs.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (idx, p) in probs.iter().take(4) {
            println!("  p={p:.3} [{idx}] {}", doc.sentences[*idx].text);
        }
        println!("  stage 1: {:?}", stage1_classify(&reloaded, doc, &lexicon, config.stage1_threshold)?);
        println!(
            "  stage 2: {:?} (gold {:?})",
            stage2_argmax(&reloaded, doc, &lexicon)?,
            gold[&doc.case_id].positive
        );
    }
    Ok(())
}
