//! Corpus-level evaluation: baseline vs. augmented accuracy, the
//! corrections/corruptions split, per-sample overlap, subsampled
//! significance, and policy sweeps.

pub mod dataset;
pub mod outcomes;
pub mod overlap;
pub mod report;
pub mod significance;
pub mod stats;
pub mod sweep;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierHandle;
use crate::error::{Error, Result};
use crate::logits::mean_logits;
use crate::policy::{Policy, PolicyDescription};
use crate::transforms::TransformSpec;
use crate::types::{ClassIndex, Seed};

pub use dataset::Dataset;
pub use outcomes::{Outcome, OutcomeRecord, OutcomeTable};
pub use overlap::{jaccard, mean_off_diagonal, OverlapMatrix};
pub use significance::{SignificanceResult, SubsamplePlan};
pub use stats::{paired_t_test, PairedTTest};
pub use report::{EvaluationReport, PolicyReport, ReportOptions};
pub use sweep::{SweepOptions, SweepReport, SweepRow};

const BASELINE_CHUNK: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyEvaluation {
    pub policy: PolicyDescription,
    pub accuracy: f64,
    pub baseline_accuracy: f64,
    pub outcomes: OutcomeTable,
}

/// Runs policies against one classifier with a fixed seed and worker pool.
///
/// Output never depends on the number of workers: documents are processed
/// independently on derived random streams and merged in dataset order.
pub struct Evaluator<'h> {
    handle: &'h ClassifierHandle,
    seed: Seed,
    pool: rayon::ThreadPool,
}

impl<'h> Evaluator<'h> {
    /// `workers == 0` uses the number of available cores.
    pub fn new(handle: &'h ClassifierHandle, seed: Seed, workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        Ok(Evaluator { handle, seed, pool })
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn handle(&self) -> &ClassifierHandle {
        self.handle
    }

    /// Labels predicted on the unaugmented inputs.
    pub fn baseline(&self, ds: &Dataset) -> Result<Vec<ClassIndex>> {
        let texts: Vec<String> = ds.documents().map(|d| d.text.clone()).collect();
        let chunks: Vec<Vec<ClassIndex>> = self.pool.install(|| {
            texts
                .par_chunks(BASELINE_CHUNK)
                .map(|chunk| Ok(self.handle.predict_logits(chunk)?.iter().map(|l| l.argmax()).collect()))
                .collect::<Result<_>>()
        })?;
        Ok(chunks.into_iter().flatten().collect())
    }

    pub fn evaluate_policy(&self, policy: &Policy, ds: &Dataset) -> Result<PolicyEvaluation> {
        if ds.is_empty() {
            return Err(Error::Config("cannot evaluate an empty dataset".into()));
        }
        policy.validate()?;
        let baseline = self.baseline(ds)?;
        let tta: Vec<ClassIndex> = self.pool.install(|| {
            ds.examples
                .par_iter()
                .map(|ex| Ok(policy.tta_predict(self.handle, &ex.doc, self.seed)?.label))
                .collect::<Result<_>>()
        })?;
        let outcomes = table(ds, &baseline, &tta);
        Ok(PolicyEvaluation {
            policy: policy.describe(),
            accuracy: outcomes.accuracy(),
            baseline_accuracy: outcomes.baseline_accuracy(),
            outcomes,
        })
    }

    /// One outcome table per sample index `k`, each comparing the baseline
    /// against the mean of the original and sample `k` alone.
    ///
    /// Sample `k` is the same draw that the `n_samples` policy over `spec`
    /// would produce, so these tables decompose that policy.
    pub fn per_sample_outcomes(&self, spec: &TransformSpec, ds: &Dataset, n_samples: usize) -> Result<Vec<OutcomeTable>> {
        if n_samples < 2 {
            return Err(Error::Config("per-sample analysis needs at least two samples".into()));
        }
        let policy = Policy::single(spec.clone(), n_samples)?;
        let baseline = self.baseline(ds)?;
        let per_doc: Vec<Vec<ClassIndex>> = self.pool.install(|| {
            ds.examples
                .par_iter()
                .map(|ex| {
                    let variants = policy.expand(&ex.doc, self.seed)?;
                    let logits = self.handle.predict_logits(&variants)?;
                    logits[1..]
                        .iter()
                        .map(|sample| Ok(mean_logits(&[logits[0].clone(), sample.clone()])?.argmax()))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()
        })?;
        Ok((0..n_samples)
            .map(|k| {
                let labels: Vec<ClassIndex> = per_doc.iter().map(|v| v[k]).collect();
                table(ds, &baseline, &labels)
            })
            .collect())
    }

    pub fn overlap(&self, spec: &TransformSpec, ds: &Dataset, n_samples: usize) -> Result<OverlapMatrix> {
        Ok(OverlapMatrix::from_tables(&self.per_sample_outcomes(spec, ds, n_samples)?))
    }

    /// Ten paired 80% subsamples and a two-sided paired t-test.
    pub fn significance(&self, policy: &Policy, ds: &Dataset, alpha: f64) -> Result<SignificanceResult> {
        let eval = self.evaluate_policy(policy, ds)?;
        self.significance_of(&eval.outcomes, alpha)
    }

    /// Significance from an existing outcome table; predictions are not
    /// recomputed per subsample.
    pub fn significance_of(&self, outcomes: &OutcomeTable, alpha: f64) -> Result<SignificanceResult> {
        if outcomes.len() < significance::DEFAULT_SUBSAMPLES {
            return Err(Error::Config(format!(
                "significance needs at least {} examples, got {}",
                significance::DEFAULT_SUBSAMPLES,
                outcomes.len()
            )));
        }
        let plan = SubsamplePlan::standard(outcomes.len(), self.seed)?;
        SignificanceResult::from_outcomes(outcomes, &plan, significance::DEFAULT_FRACTION, self.seed, alpha)
    }
}

fn table(ds: &Dataset, baseline: &[ClassIndex], tta: &[ClassIndex]) -> OutcomeTable {
    OutcomeTable::new(
        ds.examples
            .iter()
            .zip(baseline.iter().zip(tta))
            .map(|(ex, (&b, &t))| OutcomeRecord {
                id: ex.doc.id.clone(),
                label: ex.label,
                baseline: b,
                tta: t,
            })
            .collect(),
    )
}

/// Evaluates `policy` on `ds` using all available cores.
pub fn evaluate_policy(handle: &ClassifierHandle, policy: &Policy, ds: &Dataset, seed: Seed) -> Result<PolicyEvaluation> {
    Evaluator::new(handle, seed, 0)?.evaluate_policy(policy, ds)
}

pub fn per_sample_outcomes(
    handle: &ClassifierHandle,
    spec: &TransformSpec,
    ds: &Dataset,
    n_samples: usize,
    seed: Seed,
) -> Result<Vec<OutcomeTable>> {
    Evaluator::new(handle, seed, 0)?.per_sample_outcomes(spec, ds, n_samples)
}

pub fn significance(handle: &ClassifierHandle, policy: &Policy, ds: &Dataset, seed: Seed) -> Result<SignificanceResult> {
    Evaluator::new(handle, seed, 0)?.significance(policy, ds, significance::DEFAULT_ALPHA)
}
