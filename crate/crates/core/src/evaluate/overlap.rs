//! Jaccard overlap between per-sample correction and corruption sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::outcomes::{Outcome, OutcomeTable};
use crate::scalar::Scalar;

/// `|a ∩ b| / |a ∪ b|`, or `None` when both sets are empty.
pub fn jaccard<T: Scalar, K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>) -> Option<T> {
    let union = a.union(b).count();
    if union == 0 {
        return None;
    }
    let inter = a.intersection(b).count();
    Some(T::from_usize_lossy(inter) / T::from_usize_lossy(union))
}

/// K×K matrix of pairwise overlaps; `None` marks an undefined entry.
pub type Matrix = Vec<Vec<Option<f64>>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub corrections: Matrix,
    pub corruptions: Matrix,
}

impl OverlapMatrix {
    pub fn from_tables(tables: &[OutcomeTable]) -> Self {
        OverlapMatrix {
            corrections: matrix(tables, Outcome::Correction),
            corruptions: matrix(tables, Outcome::Corruption),
        }
    }

    pub fn size(&self) -> usize {
        self.corrections.len()
    }
}

fn matrix(tables: &[OutcomeTable], outcome: Outcome) -> Matrix {
    let sets: Vec<BTreeSet<&str>> = tables
        .iter()
        .map(|t| t.ids_with(outcome).into_iter().collect())
        .collect();
    sets.iter()
        .map(|a| sets.iter().map(|b| jaccard(a, b)).collect())
        .collect()
}

/// Mean of the defined off-diagonal entries.
pub fn mean_off_diagonal(m: &Matrix) -> Option<f64> {
    let vals: Vec<f64> = m
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i).filter_map(|(_, v)| *v))
        .collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard::<f64, _>(&set(&[1, 2, 3]), &set(&[2, 3, 4])), Some(0.5));
        assert_eq!(jaccard::<f64, _>(&set(&[1, 2]), &set(&[1, 2])), Some(1.0));
        assert_eq!(jaccard::<f64, _>(&set(&[1]), &set(&[2])), Some(0.0));
        assert_eq!(jaccard::<f64, _>(&set(&[]), &set(&[])), None);
        assert_eq!(jaccard::<f32, _>(&set(&[1, 2, 3]), &set(&[2, 3, 4])), Some(0.5));
    }

    #[test]
    fn mean_ignores_diagonal_and_nulls() {
        let m = vec![
            vec![Some(1.0), Some(0.5), None],
            vec![Some(0.5), Some(1.0), Some(0.25)],
            vec![None, Some(0.25), None],
        ];
        assert_eq!(mean_off_diagonal(&m), Some(0.375));
        assert_eq!(mean_off_diagonal(&vec![vec![None]]), None);
    }
}
