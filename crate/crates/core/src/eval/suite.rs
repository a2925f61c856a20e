use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grade::{grade_text, EvalCase, GradeOptions, MatchLevel};
use super::stats::{agresti_coull, Interval, InvalidCounts, Z_95};

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("suite file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("suite is empty")]
    Empty,
    #[error("case `{id}`: acceptable program {index} does not check")]
    InvalidAcceptable { id: String, index: usize },
    #[error("case `{0}` has no acceptable programs")]
    NoAcceptable(String),
    #[error("duplicate case id `{0}`")]
    DuplicateId(String),
}

pub fn load_suite(text: &str) -> Result<Vec<EvalCase>, SuiteError> {
    let cases: Vec<EvalCase> = serde_json::from_str(text)?;
    if cases.is_empty() {
        return Err(SuiteError::Empty);
    }
    let mut seen = std::collections::BTreeSet::new();
    for c in &cases {
        if !seen.insert(c.id.as_str()) {
            return Err(SuiteError::DuplicateId(c.id.clone()));
        }
        if c.acceptable.is_empty() {
            return Err(SuiteError::NoAcceptable(c.id.clone()));
        }
        for (index, p) in c.acceptable.iter().enumerate() {
            if crate::analysis::check(p).is_err() {
                return Err(SuiteError::InvalidAcceptable { id: c.id.clone(), index });
            }
        }
    }
    Ok(cases)
}

/// The suite shipped with the crate.
pub fn builtin_suite() -> Vec<EvalCase> {
    load_suite(include_str!("../../data/suite.json")).expect("bundled suite is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseResult {
    pub id: String,
    pub level: MatchLevel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub cases: Vec<CaseResult>,
    /// Counts in match-level order, `Exact` first.
    pub counts: [usize; 7],
    pub passed: usize,
    pub total: usize,
    pub pass_rate: Interval,
}

impl EvalReport {
    pub fn from_counts(counts: [usize; 7]) -> Result<Self, InvalidCounts> {
        Self::build(Vec::new(), counts)
    }

    pub fn from_results(cases: Vec<CaseResult>) -> Result<Self, InvalidCounts> {
        let mut counts = [0usize; 7];
        for c in &cases {
            counts[c.level.index()] += 1;
        }
        Self::build(cases, counts)
    }

    fn build(cases: Vec<CaseResult>, counts: [usize; 7]) -> Result<Self, InvalidCounts> {
        let total: usize = counts.iter().sum();
        let passed: usize = MatchLevel::ALL.iter().filter(|l| l.is_pass()).map(|l| counts[l.index()]).sum();
        let pass_rate = agresti_coull(passed, total, Z_95)?;
        Ok(EvalReport { cases, counts, passed, total, pass_rate })
    }

    pub fn count(&self, level: MatchLevel) -> usize {
        self.counts[level.index()]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table_header() -> String {
        let mut cols: Vec<&str> = MatchLevel::ALL.iter().map(|l| l.label()).collect();
        cols.push("Pass Rate (%)");
        format!("| {} |", cols.join(" | "))
    }

    pub fn table_row(&self) -> String {
        let mut cols: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        cols.push(self.pass_rate.to_string());
        format!("| {} |", cols.join(" | "))
    }

    /// Per-case lines followed by the counts table and the interval line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let _ = writeln!(out, "{:<24} {}", c.id, c.level);
        }
        if !self.cases.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "{}", Self::table_header());
        let _ = writeln!(out, "|{}", "---|".repeat(8));
        let _ = writeln!(out, "{}", self.table_row());
        let _ = writeln!(out, "pass {}/{}: {} % (Agresti-Coull, 95%)", self.passed, self.total, self.pass_rate);
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    pub grade: GradeOptions,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

/// Grades every case with `generate`, in parallel. Generator failures become
/// `Error` levels. Results keep suite order.
pub fn run_suite<G>(cases: &[EvalCase], generate: G, opts: SuiteOptions) -> Result<EvalReport, SuiteError>
where
    G: Fn(&EvalCase) -> Result<String, String> + Sync,
{
    if cases.is_empty() {
        return Err(SuiteError::Empty);
    }
    let work = || -> Vec<CaseResult> {
        cases
            .par_iter()
            .map(|c| {
                let out = generate(c);
                let level = grade_text(c, out.as_deref().map_err(String::as_str), opts.grade);
                CaseResult { id: c.id.clone(), level, output: out.ok() }
            })
            .collect()
    };
    let results = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(work))
            .unwrap_or_else(|_| work()),
        None => work(),
    };
    Ok(EvalReport::from_results(results).expect("non-empty suite"))
}

/// Generator that returns each case's recorded output.
pub fn offline_outputs(case: &EvalCase) -> Result<String, String> {
    case.generated.clone().ok_or_else(|| format!("case `{}` has no recorded output", case.id))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mini(levels: &[(&str, Option<&str>)]) -> Vec<EvalCase> {
        levels
            .iter()
            .enumerate()
            .map(|(i, (acc, gen))| EvalCase {
                id: format!("c{i}"),
                utterance: "u".into(),
                context: None,
                acceptable: vec![crate::lang::parse(acc).unwrap()],
                generated: gen.map(str::to_owned),
                manual_verdicts: Vec::new(),
            })
            .collect()
    }

    #[test]
    fn all_exact_gives_full_interval() {
        let cases = mini(&[("t = select_text()", Some("t = select_text()")); 4]);
        let r = run_suite(&cases, offline_outputs, SuiteOptions::default()).unwrap();
        assert_eq!(r.count(MatchLevel::Exact), 4);
        assert_eq!(r.pass_rate, agresti_coull(4, 4, Z_95).unwrap());
    }

    #[test]
    fn one_error_of_four() {
        let d = "s = select_shapes()\ndelete_shapes(shapes=s)";
        let cases = mini(&[(d, Some(d)), (d, Some(d)), (d, Some(d)), (d, None)]);
        let r = run_suite(&cases, offline_outputs, SuiteOptions { workers: Some(2), ..Default::default() }).unwrap();
        assert_eq!(r.count(MatchLevel::Error), 1);
        assert_eq!(r.passed, 3);
        assert_eq!(r.counts.iter().sum::<usize>(), r.total);
        assert_eq!(r.cases.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["c0", "c1", "c2", "c3"]);
    }

    #[test]
    fn from_counts_matches_table_row() {
        let r = EvalReport::from_counts([37, 96, 9, 37, 12, 1, 5]).unwrap();
        assert_eq!(r.passed, 191);
        assert_eq!(r.table_row(), "| 37 | 96 | 9 | 37 | 12 | 1 | 5 | 96.06 ± 2.69 |");
    }

    #[test]
    fn empty_suite_is_rejected() {
        assert!(matches!(run_suite(&[], offline_outputs, SuiteOptions::default()), Err(SuiteError::Empty)));
        assert!(matches!(load_suite("[]"), Err(SuiteError::Empty)));
    }

    #[test]
    fn invalid_acceptable_is_rejected() {
        let text = r#"[{"id":"a","utterance":"u","acceptable":["format_text(textRanges=ghost, bold=true)"]}]"#;
        assert!(matches!(load_suite(text), Err(SuiteError::InvalidAcceptable { .. })));
    }

    #[test]
    fn bundled_suite_loads() {
        let suite = builtin_suite();
        assert!(suite.len() >= 40);
    }

    #[test]
    fn bundled_suite_offline_levels() {
        let r = run_suite(&builtin_suite(), offline_outputs, SuiteOptions::default()).unwrap();
        let wrong: Vec<_> = r.cases.iter().map(|c| (c.id.as_str(), c.level)).collect();
        assert_eq!(r.counts, [18, 9, 6, 4, 3, 3, 3], "{wrong:?}");
        let level = |id: &str| r.cases.iter().find(|c| c.id == id).unwrap().level;
        assert_eq!(level("typewriter-variants"), MatchLevel::Normalized);
        assert_eq!(level("handwritten-bold"), MatchLevel::SubprogramExact);
    }
}
