//! Presentation document engine: model, context extraction, execution and
//! the replayable action log.

pub mod actions;
pub mod context;
pub mod exec;
pub mod model;

pub use actions::{replay, undoability_audit, ActionLog, ActionRecord, AuditViolation, ReplayError};
pub use context::{extract_context, extract_context_with, ContextOptions, ContextScope, ContextTree};
pub use exec::{execute, execute_with, selection_entities, transpile, ExecError, ImageProvider, StubImageProvider};
pub use model::{
    DocError, EntityPath, ImageData, Paint, PresentationDoc, Shape, ShapeKind, Slide, TextRange, FORMAT_VERSION,
};

#[cfg(test)]
mod tests;
