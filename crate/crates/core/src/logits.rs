//! Logit vectors and the averaging rule used to combine per-variant predictions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::ClassIndex;

/// A length-C vector of finite class scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogitVector<T>(Vec<T>);

impl<T: Scalar> LogitVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidLogits("empty vector".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidLogits(format!("entry {i} is not finite")));
        }
        Ok(LogitVector(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn argmax(&self) -> ClassIndex {
        // Construction guarantees non-empty and finite.
        argmax_label(self).expect("validated logits")
    }

    /// Numerically stable softmax.
    pub fn softmax(&self) -> LogitVector<T> {
        let max = self.0.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = self.0.iter().map(|&v| (v - max).exp()).collect();
        let total: T = exps.iter().copied().sum();
        LogitVector(exps.into_iter().map(|e| e / total).collect())
    }

    pub fn cast<U: Scalar>(&self) -> LogitVector<U> {
        LogitVector(
            self.0
                .iter()
                .map(|&v| U::from(v).expect("finite values cast"))
                .collect(),
        )
    }
}

impl<T> AsRef<[T]> for LogitVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

/// Index of the largest entry; exact ties resolve to the lowest index.
pub fn argmax_label<T: Scalar>(logits: &LogitVector<T>) -> Result<ClassIndex> {
    argmax_slice(logits.values())
}

pub(crate) fn argmax_slice<T: Scalar>(values: &[T]) -> Result<ClassIndex> {
    if values.is_empty() {
        return Err(Error::InvalidLogits("empty vector".into()));
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidLogits(format!("entry {i} is not finite")));
        }
        if v > values[best] {
            best = i;
        }
    }
    Ok(ClassIndex(best))
}

/// Entrywise arithmetic mean, computed as sum / K.
///
/// Each entry is clamped to the column's [min, max], which the exact mean
/// always satisfies; this makes the mean of identical vectors exact.
pub fn mean_logits<T: Scalar>(variants: &[LogitVector<T>]) -> Result<LogitVector<T>> {
    let first = variants.first().ok_or(Error::EmptyAggregation)?;
    let width = first.len();
    let mut sums = vec![T::zero(); width];
    let mut lo = first.values().to_vec();
    let mut hi = first.values().to_vec();
    for v in variants {
        if v.len() != width {
            return Err(Error::Shape {
                expected: width,
                found: v.len(),
            });
        }
        for (j, &x) in v.values().iter().enumerate() {
            sums[j] = sums[j] + x;
            lo[j] = lo[j].min(x);
            hi[j] = hi[j].max(x);
        }
    }
    let k = T::from_usize_lossy(variants.len());
    let means = sums
        .into_iter()
        .enumerate()
        .map(|(j, s)| (s / k).max(lo[j]).min(hi[j]))
        .collect();
    LogitVector::new(means)
}

/// How per-variant outputs are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean of raw logits.
    #[default]
    Logits,
    /// Mean of softmax probabilities.
    Probabilities,
}

/// An aggregated prediction together with the per-variant vectors it came from.
///
/// In `Probabilities` mode the per-variant vectors are the softmax outputs,
/// so `logits` is always the plain mean of `per_variant_logits`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction<T> {
    pub logits: LogitVector<T>,
    pub label: ClassIndex,
    pub per_variant_logits: Vec<LogitVector<T>>,
}

impl<T: Scalar> Prediction<T> {
    pub fn aggregate(per_variant: Vec<LogitVector<T>>, mode: Aggregation) -> Result<Self> {
        let per_variant_logits = match mode {
            Aggregation::Logits => per_variant,
            Aggregation::Probabilities => per_variant.iter().map(LogitVector::softmax).collect(),
        };
        let logits = mean_logits(&per_variant_logits)?;
        let label = argmax_label(&logits)?;
        Ok(Prediction {
            logits,
            label,
            per_variant_logits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(v: &[f64]) -> LogitVector<f64> {
        LogitVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax_label(&lv(&[1.0, 3.0])).unwrap(), ClassIndex(1));
        assert_eq!(argmax_label(&lv(&[0.5, 0.5])).unwrap(), ClassIndex(0));
        assert_eq!(argmax_label(&lv(&[2.0, -1.0, 2.0])).unwrap(), ClassIndex(0));
    }

    #[test]
    fn invalid_logits_rejected() {
        assert!(LogitVector::<f64>::new(vec![]).is_err());
        assert!(LogitVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(LogitVector::new(vec![f64::INFINITY, 0.0]).is_err());
        assert!(argmax_slice::<f64>(&[]).is_err());
        assert!(argmax_slice(&[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn mean_examples() {
        assert_eq!(mean_logits(&[lv(&[2.0, 0.0])]).unwrap(), lv(&[2.0, 0.0]));
        let m = mean_logits(&[lv(&[2.0, 0.0]), lv(&[0.0, 2.0]), lv(&[4.0, -2.0])]).unwrap();
        assert_eq!(m, lv(&[2.0, 0.0]));
    }

    #[test]
    fn mean_errors() {
        assert!(matches!(
            mean_logits::<f64>(&[]),
            Err(Error::EmptyAggregation)
        ));
        assert!(matches!(
            mean_logits(&[lv(&[1.0, 2.0]), lv(&[1.0])]),
            Err(Error::Shape { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let a = LogitVector::new(vec![1.0f32, 0.0]).unwrap();
        let b = LogitVector::new(vec![0.0f32, 3.0]).unwrap();
        let m = mean_logits(&[a, b]).unwrap();
        assert_eq!(m.values(), &[0.5, 1.5]);
        assert_eq!(m.argmax(), ClassIndex(1));
    }

    #[test]
    fn probability_mode_averages_softmax() {
        let p = Prediction::aggregate(vec![lv(&[0.0, 0.0]), lv(&[10.0, 0.0])], Aggregation::Probabilities)
            .unwrap();
        let s: f64 = p.logits.values().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(p.label, ClassIndex(0));
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..5, 1usize..18).prop_flat_map(|(c, k)| {
            prop::collection::vec(prop::collection::vec(-1e6f64..1e6, c), k)
        })
    }

    proptest! {
        #[test]
        fn mean_is_permutation_invariant(rows in vec_strategy(), rot in 0usize..17) {
            let vs: Vec<_> = rows.iter().map(|r| lv(r)).collect();
            let mut rev = vs.clone();
            rev.reverse();
            let k = vs.len();
            rev.rotate_left(rot % k);
            let a = mean_logits(&vs).unwrap();
            let b = mean_logits(&rev).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn mean_of_copies_is_exact(row in prop::collection::vec(-1e6f64..1e6, 1..6), k in 1usize..18) {
            let v = lv(&row);
            let m = mean_logits(&vec![v.clone(); k]).unwrap();
            prop_assert_eq!(m, v);
        }

        #[test]
        fn singleton_mean_preserves_label(row in prop::collection::vec(-1e6f64..1e6, 1..6)) {
            let v = lv(&row);
            prop_assert_eq!(mean_logits(std::slice::from_ref(&v)).unwrap(), v.clone());
            prop_assert_eq!(argmax_label(&mean_logits(std::slice::from_ref(&v)).unwrap()).unwrap(), v.argmax());
        }
    }
}
