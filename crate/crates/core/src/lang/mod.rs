//! ODSL grammar: AST, schema registry, parser and printer.

pub mod ast;
pub mod parser;
pub mod printer;
pub mod schema;
pub mod types;

pub use ast::{Argument, Literal, Placeholder, Program, Span, SpecialScope, Statement, Value};
pub use parser::{parse, parse_statement, ParseError};
pub use printer::{pretty_print, pretty_print_with, print_source_order};
pub use schema::{Family, ParamSchema, Registry, Snippet, StatementSchema};
pub use types::{EntityTag, EntityType, TagSet, ValueType};

/// Exact-match statement lookup in the bundled registry.
pub fn registry_lookup(name: &str) -> Option<&'static StatementSchema> {
    Registry::builtin().lookup(name)
}
