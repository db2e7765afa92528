//! Exhaustive evaluation of every preset policy over a transform registry.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{Dataset, Evaluator, SubsamplePlan};
use crate::error::{Error, Result};
use crate::policy::{Policy, Preset};
use crate::transforms::Registry;

/// Every policy `mode` can build from `registry`, in lexicographic order of
/// registry positions.
pub fn enumerate(registry: &Registry, mode: Preset) -> Result<Vec<Policy>> {
    let k = mode.transforms();
    if registry.len() < k {
        return Err(Error::Config(format!(
            "{} needs at least {k} registered transforms, have {}",
            mode,
            registry.len()
        )));
    }
    registry
        .specs()
        .iter()
        .cloned()
        .combinations(k)
        .map(|specs| mode.build(&specs))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub policy: String,
    pub transforms: Vec<String>,
    pub accuracy: f64,
    pub baseline_accuracy: f64,
    pub delta_pp: f64,
    pub corrections: usize,
    pub corruptions: usize,
    pub t: Option<f64>,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: Preset,
    pub dataset: String,
    pub examples: usize,
    pub seed: u64,
    pub baseline_accuracy: f64,
    /// Best first: accuracy descending, then policy name.
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// JSONL file receiving one row per finished policy.
    pub checkpoint: Option<PathBuf>,
    /// Keep rows already in the checkpoint instead of starting over.
    pub resume: bool,
    /// Stop with [`Error::Interrupted`] once this many policies are done.
    pub stop_after: Option<usize>,
    pub alpha: f64,
}

impl SweepOptions {
    pub fn new() -> Self {
        SweepOptions {
            alpha: super::significance::DEFAULT_ALPHA,
            ..Default::default()
        }
    }
}

pub fn run(evaluator: &Evaluator<'_>, registry: &Registry, ds: &Dataset, mode: Preset, options: &SweepOptions) -> Result<SweepReport> {
    let policies = enumerate(registry, mode)?;
    let mut done: HashMap<String, SweepRow> = HashMap::new();
    if let Some(path) = &options.checkpoint {
        if options.resume {
            for row in read_checkpoint(path)? {
                done.insert(row.policy.clone(), row);
            }
        } else if path.exists() {
            std::fs::remove_file(path).map_err(|e| Error::io(path, e))?;
        }
    }
    let plan = SubsamplePlan::standard(ds.len(), evaluator.seed())?;
    let baseline = evaluator.baseline(ds)?;
    let baseline_accuracy =
        ds.examples.iter().zip(&baseline).filter(|(e, b)| e.label == **b).count() as f64 / ds.len() as f64;

    let mut rows = Vec::with_capacity(policies.len());
    for policy in &policies {
        if let Some(row) = done.remove(&policy.name) {
            rows.push(row);
            continue;
        }
        if options.stop_after.is_some_and(|n| rows.len() >= n) {
            return Err(Error::Interrupted {
                completed: rows.len(),
                total: policies.len(),
            });
        }
        let eval = evaluator.evaluate_policy(policy, ds)?;
        let sig = super::SignificanceResult::from_outcomes(
            &eval.outcomes,
            &plan,
            super::significance::DEFAULT_FRACTION,
            evaluator.seed(),
            options.alpha,
        )?;
        let row = SweepRow {
            policy: policy.name.clone(),
            transforms: policy.entries.iter().map(|e| e.spec.name.clone()).collect(),
            accuracy: eval.accuracy,
            baseline_accuracy: eval.baseline_accuracy,
            delta_pp: eval.outcomes.delta_pp(),
            corrections: eval.outcomes.corrections().len(),
            corruptions: eval.outcomes.corruptions().len(),
            t: sig.t,
            p_value: sig.p_value,
            significant: sig.significant,
        };
        if let Some(path) = &options.checkpoint {
            append_checkpoint(path, &row)?;
        }
        rows.push(row);
    }
    rows.sort_by(|a, b| {
        b.accuracy
            .partial_cmp(&a.accuracy)
            .expect("finite accuracy")
            .then_with(|| a.policy.cmp(&b.policy))
    });
    Ok(SweepReport {
        mode,
        dataset: ds.name.clone(),
        examples: ds.len(),
        seed: evaluator.seed().value(),
        baseline_accuracy,
        rows,
    })
}

fn read_checkpoint(path: &Path) -> Result<Vec<SweepRow>> {
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut rows = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        // A torn final line from a killed run is dropped; that policy reruns.
        match serde_json::from_str(&line) {
            Ok(row) => rows.push(row),
            Err(_) => break,
        }
    }
    Ok(rows)
}

fn append_checkpoint(path: &Path, row: &SweepRow) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut line = serde_json::to_string(row)?;
    line.push('\n');
    f.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "rank,policy,acc,delta_pp,corrections,corruptions,t,p,significant";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                i + 1,
                super::report::csv_field(&r.policy),
                r.accuracy,
                r.delta_pp,
                r.corrections,
                r.corruptions,
                r.t.map(|t| t.to_string()).unwrap_or_default(),
                r.p_value,
                r.significant
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        let reg = Registry::default_word();
        assert_eq!(enumerate(&reg, Preset::FourSamplesFourAugs).unwrap().len(), 126);
        assert_eq!(enumerate(&reg, Preset::OneSampleFourAugs).unwrap().len(), 126);
        assert_eq!(enumerate(&reg, Preset::FourSamplesOneAug).unwrap().len(), 9);
        assert_eq!(enumerate(&reg, Preset::OneSampleOneAug).unwrap().len(), 9);
        assert_eq!(enumerate(&reg.truncated(4), Preset::FourSamplesFourAugs).unwrap().len(), 1);
        assert!(enumerate(&reg.truncated(3), Preset::FourSamplesFourAugs).is_err());
    }

    #[test]
    fn enumerated_policies_are_distinct() {
        let ps = enumerate(&Registry::default_word(), Preset::FourSamplesFourAugs).unwrap();
        let names: std::collections::HashSet<_> = ps.iter().map(|p| p.name.clone()).collect();
        assert_eq!(names.len(), 126);
        assert!(ps.iter().all(|p| p.variant_count() == 17));
    }
}
