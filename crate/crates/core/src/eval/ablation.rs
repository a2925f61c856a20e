use serde::{Deserialize, Serialize};

use super::stats::Interval;
use super::suite::EvalReport;

/// One published ablation configuration with its match-level counts and the
/// pass rate reported alongside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AblationRow {
    pub entity_classifier: bool,
    pub context_classifier: bool,
    pub code_correction: bool,
    pub k: usize,
    pub counts: [usize; 7],
    pub pass_rate: Interval,
}

impl AblationRow {
    pub fn report(&self) -> EvalReport {
        EvalReport::from_counts(self.counts).expect("published counts are valid")
    }

    pub fn label(&self) -> String {
        let mark = |b: bool| if b { "on" } else { "off" };
        format!(
            "entities={} context={} correction={} k={}",
            mark(self.entity_classifier),
            mark(self.context_classifier),
            mark(self.code_correction),
            self.k
        )
    }
}

pub fn ablation_rows() -> Vec<AblationRow> {
    serde_json::from_str(include_str!("../../data/ablation.json")).expect("bundled ablation table is valid")
}
