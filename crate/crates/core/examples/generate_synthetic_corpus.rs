//! Writes the synthetic corpus to a directory (default: the bundled copy
//! under `data/synthetic`).
//!
//!     cargo run --example generate_synthetic_corpus -- [OUT_DIR] [SEED]

use std::path::PathBuf;

use ape::synthetic::{generate, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic"));
    let mut config = SyntheticConfig::default();
    if let Some(seed) = args.next() {
        config.seed = seed.parse()?;
    }
    let corpus = generate(&config);
    corpus.write_to(&out)?;

    let sentences: usize = corpus.cases.iter().map(|c| c.decision.sentences.len()).sum();
    println!(
        "wrote {} decisions ({sentences} sentences) to {}",
        corpus.cases.len(),
        out.display()
    );
    println!("ambiguous cases: {:?}", corpus.ambiguous_ids());
    Ok(())
}
