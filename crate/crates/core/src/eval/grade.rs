use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::check;
use crate::doc::ContextTree;
use crate::lang::{parse, pretty_print, Program};

use super::normalize::normalize_program;
use super::subprogram::{is_strict_subprogram, is_subprogram};

/// Program match levels, best first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchLevel {
    Exact,
    Normalized,
    SubprogramExact,
    SubprogramNormalized,
    ManualCheckValid,
    None,
    Error,
}

impl MatchLevel {
    pub const ALL: [MatchLevel; 7] = [
        MatchLevel::Exact,
        MatchLevel::Normalized,
        MatchLevel::SubprogramExact,
        MatchLevel::SubprogramNormalized,
        MatchLevel::ManualCheckValid,
        MatchLevel::None,
        MatchLevel::Error,
    ];

    pub fn is_pass(self) -> bool {
        self <= MatchLevel::ManualCheckValid
    }

    pub fn is_subprogram(self) -> bool {
        matches!(self, MatchLevel::SubprogramExact | MatchLevel::SubprogramNormalized)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            MatchLevel::Exact => "Exact",
            MatchLevel::Normalized => "Normalized",
            MatchLevel::SubprogramExact => "Subprogram Exact",
            MatchLevel::SubprogramNormalized => "Subprogram Normalized",
            MatchLevel::ManualCheckValid => "Manual Check Valid",
            MatchLevel::None => "None",
            MatchLevel::Error => "Error",
        }
    }
}

impl fmt::Display for MatchLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A recorded human judgement of one generated program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManualVerdict {
    /// Generated program; compared after (non-desensitizing) normalization.
    pub program: String,
    pub valid: bool,
}

mod programs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::lang::{parse, print_source_order, Program};

    pub fn serialize<S: Serializer>(ps: &[Program], s: S) -> Result<S::Ok, S::Error> {
        let texts: Vec<String> = ps.iter().map(|p| print_source_order(p).trim_end().to_owned()).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Program>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts.iter().map(|t| parse(t).map_err(serde::de::Error::custom)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalCase {
    pub id: String,
    pub utterance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextTree>,
    #[serde(with = "programs")]
    pub acceptable: Vec<Program>,
    /// Pre-generated output, kept as raw text so that unparsable outputs
    /// can be graded as errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub manual_verdicts: Vec<ManualVerdict>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GradeOptions {
    /// Demote subprogram matches so they fall through to manual verdicts.
    pub strict: bool,
}

/// Parses and checks a raw output; any failure grades as `Error`.
pub fn grade_text(case: &EvalCase, output: Result<&str, &str>, opts: GradeOptions) -> MatchLevel {
    match output {
        Err(_) => MatchLevel::Error,
        Ok(text) => match parse(text) {
            Ok(p) => grade(case, Ok(&p), opts),
            Err(_) => MatchLevel::Error,
        },
    }
}

pub fn grade(case: &EvalCase, generated: Result<&Program, &str>, opts: GradeOptions) -> MatchLevel {
    let Ok(gen) = generated else { return MatchLevel::Error };
    if gen.is_empty() || check(gen).is_err() {
        return MatchLevel::Error;
    }
    if case.acceptable.iter().any(|a| a == gen) {
        return MatchLevel::Exact;
    }
    let gen_n = normalize_program(gen, true);
    let acc_n: Vec<Program> = case.acceptable.iter().map(|a| normalize_program(a, true)).collect();
    if acc_n.contains(&gen_n) {
        return MatchLevel::Normalized;
    }
    if !opts.strict {
        if case.acceptable.iter().any(|a| is_strict_subprogram(a, gen)) {
            return MatchLevel::SubprogramExact;
        }
        if acc_n.iter().any(|a| is_subprogram(a, &gen_n)) {
            return MatchLevel::SubprogramNormalized;
        }
    }
    if manual_verdict(case, gen) == Some(true) {
        return MatchLevel::ManualCheckValid;
    }
    MatchLevel::None
}

/// Key under which manual verdicts are stored for a generated program.
pub fn verdict_key(p: &Program) -> String {
    pretty_print(&normalize_program(p, false))
}

fn manual_verdict(case: &EvalCase, gen: &Program) -> Option<bool> {
    let key = verdict_key(gen);
    case.manual_verdicts.iter().find(|v| parse(&v.program).is_ok_and(|p| verdict_key(&p) == key)).map(|v| v.valid)
}
