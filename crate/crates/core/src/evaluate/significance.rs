//! Paired significance over repeated random subsamples of the test set.

use serde::{Deserialize, Serialize};

use super::outcomes::OutcomeTable;
use super::stats::paired_t_test;
use crate::error::{Error, Result};
use crate::transforms::choose_k;
use crate::types::Seed;

pub const DEFAULT_SUBSAMPLES: usize = 10;
pub const DEFAULT_FRACTION: f64 = 0.8;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Index sets drawn without replacement, independently per subsample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsamplePlan {
    pub population: usize,
    pub subsets: Vec<Vec<usize>>,
}

impl SubsamplePlan {
    pub fn draw(population: usize, count: usize, fraction: f64, seed: Seed) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Config(format!("subsample fraction {fraction} outside (0, 1]")));
        }
        let size = subsample_size(population, fraction);
        if size == 0 {
            return Err(Error::Config(format!("population {population} too small to subsample")));
        }
        let all: Vec<usize> = (0..population).collect();
        let base = seed.derive_str("subsample");
        let subsets = (0..count)
            .map(|i| choose_k(&mut base.derive(i as u64).rng(), &all, size))
            .collect();
        Ok(SubsamplePlan { population, subsets })
    }

    pub fn standard(population: usize, seed: Seed) -> Result<Self> {
        Self::draw(population, DEFAULT_SUBSAMPLES, DEFAULT_FRACTION, seed)
    }
}

/// `floor(fraction * n)`, robust to the representation error in `fraction`.
pub fn subsample_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64) + 1e-9).floor() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyPair {
    pub baseline: f64,
    pub tta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub subsample_count: usize,
    pub subsample_fraction: f64,
    pub subsample_size: usize,
    pub seed: u64,
    pub pairs: Vec<AccuracyPair>,
    pub mean_delta: f64,
    /// Absent when the deltas have zero variance and non-zero mean.
    pub t: Option<f64>,
    pub df: usize,
    pub p_value: f64,
    pub degenerate: bool,
    pub alpha: f64,
    pub significant: bool,
}

impl SignificanceResult {
    /// Baseline and augmented accuracy are both measured on each subset in
    /// `plan`, so every pair is computed on identical examples.
    pub fn from_outcomes(table: &OutcomeTable, plan: &SubsamplePlan, fraction: f64, seed: Seed, alpha: f64) -> Result<Self> {
        if plan.population != table.len() {
            return Err(Error::Shape {
                expected: plan.population,
                found: table.len(),
            });
        }
        let pairs: Vec<AccuracyPair> = plan
            .subsets
            .iter()
            .map(|subset| {
                let n = subset.len() as f64;
                let (mut b, mut t) = (0usize, 0usize);
                for &i in subset {
                    let r = &table.records[i];
                    b += usize::from(r.baseline == r.label);
                    t += usize::from(r.tta == r.label);
                }
                AccuracyPair {
                    baseline: b as f64 / n,
                    tta: t as f64 / n,
                }
            })
            .collect();
        let before: Vec<f64> = pairs.iter().map(|p| p.baseline).collect();
        let after: Vec<f64> = pairs.iter().map(|p| p.tta).collect();
        let test = paired_t_test(&before, &after)?;
        Ok(SignificanceResult {
            subsample_count: pairs.len(),
            subsample_fraction: fraction,
            subsample_size: plan.subsets.first().map_or(0, Vec::len),
            seed: seed.value(),
            pairs,
            mean_delta: test.mean_delta,
            t: test.t,
            df: test.df,
            p_value: test.p_value,
            degenerate: test.degenerate,
            alpha,
            significant: test.p_value < alpha,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::outcomes::OutcomeRecord;
    use crate::types::ClassIndex;

    #[test]
    fn plan_shape() {
        let plan = SubsamplePlan::standard(200, Seed(4)).unwrap();
        assert_eq!(plan.subsets.len(), 10);
        for s in &plan.subsets {
            assert_eq!(s.len(), 160);
            assert!(s.windows(2).all(|w| w[0] < w[1]), "sorted, no repeats");
            assert!(s.iter().all(|&i| i < 200));
        }
        assert_ne!(plan.subsets[0], plan.subsets[1]);
        assert_eq!(plan, SubsamplePlan::standard(200, Seed(4)).unwrap());
    }

    #[test]
    fn sizes_floor() {
        assert_eq!(subsample_size(10, 0.8), 8);
        assert_eq!(subsample_size(13, 0.8), 10);
        assert_eq!(subsample_size(5, 0.8), 4);
        assert_eq!(subsample_size(133_782, 0.8), 107_025);
    }

    #[test]
    fn identical_predictions_are_not_significant() {
        let table = OutcomeTable::new(
            (0..50)
                .map(|i| OutcomeRecord {
                    id: i.to_string(),
                    label: ClassIndex(i % 2),
                    baseline: ClassIndex(i % 3 % 2),
                    tta: ClassIndex(i % 3 % 2),
                })
                .collect(),
        );
        let plan = SubsamplePlan::standard(50, Seed(1)).unwrap();
        let r = SignificanceResult::from_outcomes(&table, &plan, 0.8, Seed(1), 0.05).unwrap();
        assert_eq!(r.t, Some(0.0));
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant);
    }
}
