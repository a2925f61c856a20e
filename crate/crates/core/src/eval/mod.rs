//! Grading generated programs against acceptable ones: normalization,
//! subprogram containment, match levels and pass-rate statistics.

pub mod ablation;
pub mod grade;
pub mod normalize;
pub mod stats;
pub mod subprogram;
pub mod suite;

pub use ablation::{ablation_rows, AblationRow};
pub use grade::{grade, grade_text, verdict_key, EvalCase, GradeOptions, ManualVerdict, MatchLevel};
pub use normalize::{normalize_program, normalize_with};
pub use stats::{agresti_coull, Interval, InvalidCounts, Z_95};
pub use subprogram::{is_strict_subprogram, is_subprogram};
pub use suite::{
    builtin_suite, load_suite, offline_outputs, run_suite, CaseResult, EvalReport, SuiteError, SuiteOptions,
};
