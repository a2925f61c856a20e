//! Classify an utterance and retrieve few-shot samples from the bundled bank
//! with the offline embedder.
//!
//! cargo run --example retrieval -- "Insert a picture of a dog with a caption"

use odsl::arm::{classify, select_samples, Classifier, HashingEmbedder, SampleBank};

fn main() {
    let utterance = std::env::args().nth(1).unwrap_or_else(|| "Insert a picture of a dog with a caption".into());
    let analysis = classify(&utterance, Classifier::Rules).unwrap();
    let tags: Vec<_> = analysis.entities.iter().map(|t| t.as_str()).collect();
    println!("entities: {tags:?}, requires context: {}", analysis.requires_context);

    let bank = SampleBank::builtin();
    for k in [1, 3] {
        println!("k = {k}");
        for s in select_samples(&utterance, &bank, analysis.entities, k, &HashingEmbedder::default()).unwrap() {
            println!("  {:.3}  {:<28} {}", s.score, s.record.id, s.record.utterance);
        }
    }
}
