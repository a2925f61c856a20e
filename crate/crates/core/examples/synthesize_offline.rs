//! End-to-end synthesis with a scripted model: classification, retrieval,
//! prompt construction, completion and repair.
//!
//! cargo run --example synthesize_offline

use odsl::arm::{HashingEmbedder, MockLlm, Purpose, RetrievalConfig, SampleBank, Synthesizer};
use odsl::doc::{extract_context, ContextScope, PresentationDoc};
use odsl::lang::pretty_print;

fn main() {
    let utterance = "Make the text look playful";
    // The scripted model answers with a misspelled font that the fixer repairs.
    let llm = MockLlm::default().with(
        Purpose::Synthesize,
        utterance,
        "```\ntext = select_text()\nformat_text(textRanges=text, fontName=\"Comic Sans\")\n```",
    );
    let bank = SampleBank::builtin();
    let embedder = HashingEmbedder::default();
    let synth = Synthesizer { bank: &bank, llm: &llm, embedder: &embedder, config: RetrievalConfig::default() };

    let context = extract_context(&PresentationDoc::default(), ContextScope::Selection);
    let out = synth.synthesize(utterance, &context).unwrap();
    println!("{}", out.prompt.render());
    println!("--- completion\n{}\n--- program", out.completion);
    print!("{}", pretty_print(&out.program));
    println!("--- {} repair(s), ~{} prompt tokens", out.report.applied.len(), out.prompt.estimated_tokens);
}
