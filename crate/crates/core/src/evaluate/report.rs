//! The evaluation report: one JSON document plus a flat per-policy CSV.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::overlap::{mean_off_diagonal, OverlapMatrix};
use super::{Dataset, Evaluator, PolicyEvaluation, SignificanceResult};
use crate::classifier::{Backend, ClassifierHandle};
use crate::error::{Error, Result};
use crate::policy::{Policy, PolicyDescription};

pub const SCHEMA_VERSION: u32 = 1;
pub const SUMMARY_HEADER: &str = "name,acc,delta_pp,corrections,corruptions,t,p";
pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.csv";

/// JSON Schema for [`EvaluationReport`] documents.
pub const REPORT_SCHEMA: &str = include_str!("../../docs/report.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub examples: usize,
    pub num_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub fingerprint: String,
    pub backend: Backend,
    pub num_classes: usize,
    pub metadata: BTreeMap<String, String>,
}

impl ClassifierSummary {
    pub fn of(handle: &ClassifierHandle) -> Self {
        ClassifierSummary {
            fingerprint: handle.fingerprint().to_string(),
            backend: handle.backend_kind(),
            num_classes: handle.num_classes(),
            metadata: handle.metadata(),
        }
    }
}

/// Pairwise sample overlap for a single-transform policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub transform: String,
    pub samples: usize,
    pub corrections: Vec<Vec<Option<f64>>>,
    pub corruptions: Vec<Vec<Option<f64>>>,
    pub mean_corrections: Option<f64>,
    pub mean_corruptions: Option<f64>,
}

impl OverlapReport {
    pub fn new(transform: impl Into<String>, matrix: OverlapMatrix) -> Self {
        OverlapReport {
            transform: transform.into(),
            samples: matrix.size(),
            mean_corrections: mean_off_diagonal(&matrix.corrections),
            mean_corruptions: mean_off_diagonal(&matrix.corruptions),
            corrections: matrix.corrections,
            corruptions: matrix.corruptions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub policy: PolicyDescription,
    pub accuracy: f64,
    pub baseline_accuracy: f64,
    pub delta_pp: f64,
    pub correct: usize,
    pub baseline_correct: usize,
    pub corrections: Vec<String>,
    pub corruptions: Vec<String>,
    pub unchanged: usize,
    pub significance: Option<SignificanceResult>,
    pub overlap: Option<OverlapReport>,
}

impl PolicyReport {
    pub fn new(eval: &PolicyEvaluation, significance: Option<SignificanceResult>, overlap: Option<OverlapReport>) -> Self {
        let owned = |ids: Vec<&str>| ids.into_iter().map(str::to_string).collect();
        PolicyReport {
            policy: eval.policy.clone(),
            accuracy: eval.accuracy,
            baseline_accuracy: eval.baseline_accuracy,
            delta_pp: eval.outcomes.delta_pp(),
            correct: eval.outcomes.tta_correct(),
            baseline_correct: eval.outcomes.baseline_correct(),
            corrections: owned(eval.outcomes.corrections()),
            corruptions: owned(eval.outcomes.corruptions()),
            unchanged: eval.outcomes.unchanged().len(),
            significance,
            overlap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub dataset: DatasetSummary,
    pub classifier: ClassifierSummary,
    pub seed: u64,
    pub baseline_accuracy: f64,
    pub policies: Vec<PolicyReport>,
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub alpha: f64,
    /// Skip the subsampled t-test (it needs at least ten examples).
    pub significance: bool,
    /// Compute sample overlap for single-transform multi-sample policies.
    pub overlap: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            alpha: super::significance::DEFAULT_ALPHA,
            significance: true,
            overlap: true,
        }
    }
}

/// Evaluates each policy in order and assembles the report.
pub fn build(evaluator: &Evaluator<'_>, policies: &[Policy], ds: &Dataset, options: &ReportOptions) -> Result<EvaluationReport> {
    if ds.is_empty() {
        return Err(Error::Config("cannot evaluate an empty dataset".into()));
    }
    let baseline = evaluator.baseline(ds)?;
    let baseline_correct = ds.examples.iter().zip(&baseline).filter(|(e, b)| e.label == **b).count();
    let mut reports = Vec::with_capacity(policies.len());
    for policy in policies {
        let eval = evaluator.evaluate_policy(policy, ds)?;
        let significance = if options.significance {
            Some(evaluator.significance_of(&eval.outcomes, options.alpha)?)
        } else {
            None
        };
        let overlap = match policy.entries.as_slice() {
            [entry] if options.overlap && entry.n_samples >= 2 => Some(OverlapReport::new(
                entry.spec.name.clone(),
                evaluator.overlap(&entry.spec, ds, entry.n_samples)?,
            )),
            _ => None,
        };
        reports.push(PolicyReport::new(&eval, significance, overlap));
    }
    Ok(EvaluationReport {
        schema_version: SCHEMA_VERSION,
        dataset: DatasetSummary {
            name: ds.name.clone(),
            examples: ds.len(),
            num_classes: ds.num_classes,
        },
        classifier: ClassifierSummary::of(evaluator.handle()),
        seed: evaluator.seed().value(),
        baseline_accuracy: baseline_correct as f64 / ds.len() as f64,
        policies: reports,
    })
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let report: EvaluationReport = serde_json::from_str(src)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported report schema version {} (expected {SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&src)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        for p in &self.policies {
            let (t, pv) = match &p.significance {
                Some(s) => (s.t.map(|t| t.to_string()).unwrap_or_default(), s.p_value.to_string()),
                None => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&p.policy.name),
                p.accuracy,
                p.delta_pp,
                p.corrections.len(),
                p.corruptions.len(),
                t,
                pv
            ));
        }
        out
    }

    /// Writes `report.json` and `summary.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join(REPORT_FILE), &self.to_json()?)?;
        write_file(&dir.join(SUMMARY_FILE), &self.summary_csv())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
