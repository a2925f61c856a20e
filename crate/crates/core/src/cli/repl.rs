use std::collections::VecDeque;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use crate::analysis::check;
use crate::arm::Synthesizer;
use crate::doc::{execute, extract_context, ContextScope, PresentationDoc};
use crate::lang::pretty_print;

pub const HELP: &str = "\
Type an utterance to synthesize a program for the current document.
Commands:
  :undo      restore the document as it was before the last applied program
  :context   print the context tree of the selection
  :doc       print the document
  :help      show this message
  :quit      leave, offering to save the document
";

#[derive(Debug, Clone)]
pub struct ReplOptions {
    pub undo_depth: usize,
    /// Apply every clean program without asking.
    pub auto_apply: bool,
    /// Where `:quit` offers to save.
    pub save_path: Option<PathBuf>,
}

impl Default for ReplOptions {
    fn default() -> Self {
        ReplOptions { undo_depth: 20, auto_apply: false, save_path: None }
    }
}

fn ask(input: &mut dyn BufRead, out: &mut dyn Write, question: &str) -> io::Result<bool> {
    write!(out, "{question} [y/N] ")?;
    out.flush()?;
    let mut line = String::new();
    input.read_line(&mut line)?;
    Ok(matches!(line.trim(), "y" | "Y" | "yes"))
}

/// Runs the session until `:quit` or end of input and returns the final
/// document.
pub fn run_repl(
    synth: &Synthesizer<'_>,
    mut doc: PresentationDoc,
    opts: ReplOptions,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> io::Result<PresentationDoc> {
    let mut undo: VecDeque<PresentationDoc> = VecDeque::new();
    let mut dirty = false;
    let mut line = String::new();
    loop {
        write!(out, "odsl> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            break;
        }
        let utterance = line.trim();
        if utterance.is_empty() {
            continue;
        }
        if let Some(cmd) = utterance.strip_prefix(':') {
            match cmd {
                "quit" | "q" => {
                    if dirty {
                        if let Some(path) = &opts.save_path {
                            if ask(input, out, &format!("save changes to {}?", path.display()))? {
                                std::fs::write(path, doc.to_json() + "\n")?;
                                writeln!(out, "saved")?;
                            }
                        }
                    }
                    break;
                }
                "undo" => match undo.pop_back() {
                    Some(prev) => {
                        doc = prev;
                        dirty = true;
                        writeln!(out, "undone")?;
                    }
                    None => writeln!(out, "nothing to undo")?,
                },
                "context" => writeln!(out, "{}", extract_context(&doc, ContextScope::Selection).to_pretty_string())?,
                "doc" => writeln!(out, "{}", doc.to_json())?,
                "help" => write!(out, "{HELP}")?,
                other => write!(out, "unknown command `:{other}`\n{HELP}")?,
            }
            continue;
        }

        let context = extract_context(&doc, ContextScope::Selection);
        let result = match synth.synthesize(utterance, &context) {
            Ok(r) => r,
            Err(e) => {
                writeln!(out, "error: {e}")?;
                continue;
            }
        };
        write!(out, "{}", pretty_print(&result.program))?;
        for a in &result.report.applied {
            writeln!(out, "  fixed {:?}: {} -> {}", a.rule, a.before, a.after)?;
        }
        if !result.is_clean() {
            for d in &result.report.residual {
                writeln!(out, "  {d}")?;
            }
            writeln!(out, "not applied: the program has diagnostics")?;
            continue;
        }
        if !opts.auto_apply && !ask(input, out, "apply?")? {
            continue;
        }
        let tp = check(&result.program).expect("clean programs check");
        match execute(&tp, &doc) {
            Ok((after, log)) => {
                for r in &log.records {
                    let args = serde_json::to_string(&r.args).unwrap_or_default();
                    writeln!(out, "  {} {} {}", r.op, r.path, args)?;
                }
                if log.is_empty() {
                    writeln!(out, "  (no changes)")?;
                }
                undo.push_back(std::mem::replace(&mut doc, after));
                if undo.len() > opts.undo_depth {
                    undo.pop_front();
                }
                dirty = true;
            }
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::{HashingEmbedder, MockLlm, Purpose, RetrievalConfig, SampleBank};
    use crate::doc::{Shape, ShapeKind, Slide};

    const TYPEWRITER: &str = "Change the text format to make it look like a typewriter";

    fn doc() -> PresentationDoc {
        let slide = Slide::new(Some("Title and Content"))
            .with_shape(Shape::new("Title", ShapeKind::Textbox).with_text("Hello"));
        let mut d = PresentationDoc::new(vec![slide]);
        d.selection = vec![crate::doc::EntityPath::Slide(0)];
        d
    }

    fn session(script: &str, opts: ReplOptions) -> (PresentationDoc, String) {
        let bank = SampleBank::builtin();
        let llm = MockLlm::default()
            .with(
                Purpose::Synthesize,
                TYPEWRITER,
                "text = select_text()\nformat_text(textRanges=text, fontName=\"Courier New\", size=18)",
            )
            .with(Purpose::Synthesize, "Add a slide", "s = insert_slides(precededBy=slides, layout=\"Blank\")");
        let embedder = HashingEmbedder::default();
        let synth = Synthesizer { bank: &bank, llm: &llm, embedder: &embedder, config: RetrievalConfig::default() };
        let mut input = script.as_bytes();
        let mut out = Vec::new();
        let d = run_repl(&synth, doc(), opts, &mut input, &mut out).unwrap();
        (d, String::from_utf8(out).unwrap())
    }

    #[test]
    fn typewriter_program_is_shown_and_applied() {
        let (d, out) = session(&format!("{TYPEWRITER}\ny\n:quit\n"), ReplOptions::default());
        assert!(out.contains("fontName=\"Courier New\""), "{out}");
        assert!(out.contains("format_text"));
        assert_eq!(d.slides[0].shapes[0].text_range.as_ref().unwrap().font_name, "Courier New");
    }

    #[test]
    fn undo_restores_the_snapshot() {
        let (d, out) = session("Add a slide\ny\n:undo\n:quit\n", ReplOptions::default());
        assert!(out.contains("undone"));
        assert_eq!(d, doc());
    }

    #[test]
    fn declined_programs_are_not_applied() {
        let (d, _) = session("Add a slide\nn\n", ReplOptions::default());
        assert_eq!(d, doc());
    }

    #[test]
    fn unknown_command_prints_help_and_continues() {
        let (d, out) = session(":frob\nAdd a slide\ny\n", ReplOptions::default());
        assert!(out.contains("unknown command `:frob`"));
        assert!(out.contains(":undo"));
        assert_eq!(d.slides.len(), 2);
    }

    #[test]
    fn synthesis_errors_do_not_end_the_session() {
        let (d, out) = session("Something unscripted\nAdd a slide\ny\n", ReplOptions::default());
        assert!(out.contains("error:"));
        assert_eq!(d.slides.len(), 2);
    }

    #[test]
    fn undo_depth_is_bounded() {
        let opts = ReplOptions { undo_depth: 2, auto_apply: true, save_path: None };
        let script = "Add a slide\n".repeat(4) + ":undo\n:undo\n:undo\n";
        let (d, out) = session(&script, opts);
        assert_eq!(d.slides.len(), 3);
        assert!(out.contains("nothing to undo"));
    }

    #[test]
    fn quit_offers_to_save() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("doc.json");
        let opts = ReplOptions { save_path: Some(path.clone()), ..ReplOptions::default() };
        let (d, _) = session("Add a slide\ny\n:quit\ny\n", opts);
        let saved = PresentationDoc::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(saved, d);
    }
}
