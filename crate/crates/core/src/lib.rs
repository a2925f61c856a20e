//! Toolchain for the Office Domain Specific Language (ODSL).
//!
//! ODSL is a small, line-oriented, statically typed language for acting on
//! presentation entities (slides, shapes, text ranges). This crate provides:
//!
//! - [`lang`]: grammar, AST, schema registry, parser and printer
//! - [`analysis`]: static checking with structured diagnostics
//! - [`fix`]: rule-based auto-correction of checker diagnostics
//! - [`doc`]: an in-memory presentation model, context-tree extraction,
//!   execution with no-op runtime semantics and a replayable action log
//! - [`arm`]: analysis-retrieval prompt construction and program synthesis
//!   over pluggable LLM and embedding providers
//! - [`eval`]: program normalization, subprogram matching, grading and
//!   Agresti-Coull pass-rate statistics
//! - [`cli`]: the `odsl` command-line front end
//!
//! ```
//! use odsl::{analysis, fix, lang};
//!
//! let program = lang::parse("text = select_text()\nformat_text(textRanges=text, fontName=\"Cmic Sans\")").unwrap();
//! let diags = analysis::check(&program).unwrap_err();
//! let report = fix::fix(&program, &diags);
//! assert!(report.residual.is_empty());
//! assert!(lang::pretty_print(&report.program).contains("Comic Sans MS"));
//! ```

pub mod analysis;
pub mod arm;
pub mod cli;
pub mod doc;
pub mod eval;
pub mod fix;
pub mod lang;
