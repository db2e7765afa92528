//! Per-example comparison of baseline and augmented predictions.

use serde::{Deserialize, Serialize};

use crate::types::ClassIndex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub id: String,
    pub label: ClassIndex,
    pub baseline: ClassIndex,
    pub tta: ClassIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Baseline wrong, augmented right.
    Correction,
    /// Baseline right, augmented wrong.
    Corruption,
    /// Correctness did not change.
    Unchanged,
}

impl OutcomeRecord {
    pub fn outcome(&self) -> Outcome {
        match (self.baseline == self.label, self.tta == self.label) {
            (false, true) => Outcome::Correction,
            (true, false) => Outcome::Corruption,
            _ => Outcome::Unchanged,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeTable {
    pub records: Vec<OutcomeRecord>,
}

impl OutcomeTable {
    pub fn new(records: Vec<OutcomeRecord>) -> Self {
        OutcomeTable { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn baseline_correct(&self) -> usize {
        self.records.iter().filter(|r| r.baseline == r.label).count()
    }

    pub fn tta_correct(&self) -> usize {
        self.records.iter().filter(|r| r.tta == r.label).count()
    }

    pub fn baseline_accuracy(&self) -> f64 {
        ratio(self.baseline_correct(), self.len())
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tta_correct(), self.len())
    }

    pub fn ids_with(&self, outcome: Outcome) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| r.outcome() == outcome)
            .map(|r| r.id.as_str())
            .collect()
    }

    pub fn corrections(&self) -> Vec<&str> {
        self.ids_with(Outcome::Correction)
    }

    pub fn corruptions(&self) -> Vec<&str> {
        self.ids_with(Outcome::Corruption)
    }

    pub fn unchanged(&self) -> Vec<&str> {
        self.ids_with(Outcome::Unchanged)
    }

    /// Examples whose predicted label moved, whether or not correctness did.
    pub fn label_changes(&self) -> usize {
        self.records.iter().filter(|r| r.baseline != r.tta).count()
    }

    /// `tta_correct - baseline_correct`, which always equals
    /// `|corrections| - |corruptions|`.
    pub fn net_gain(&self) -> i64 {
        self.tta_correct() as i64 - self.baseline_correct() as i64
    }

    /// Accuracy change in percentage points.
    pub fn delta_pp(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.net_gain() as f64 * 100.0 / self.len() as f64
    }
}

fn ratio(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}
