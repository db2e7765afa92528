//! Bag-of-n-grams multinomial logistic regression.
//!
//! Features are unigram and bigram counts over lowercased word tokens,
//! L2-normalised per document. Training is full-batch gradient descent on
//! mean cross-entropy plus an L2 penalty on the weights (not the bias).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Backend, Classifier};
use crate::error::{Error, Result};
use crate::logits::argmax_slice;
use crate::scalar::Scalar;
use crate::tokenize::tokenize;
use crate::types::LabeledExample;
use crate::{LogitVector, Logits};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    /// N-grams seen fewer times than this are left out of the vocabulary.
    pub min_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 2.0,
            epochs: 300,
            l2: 1e-4,
            seed: 0,
            min_count: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Objective before training and after every epoch.
    pub losses: Vec<f64>,
    pub train_accuracy: f64,
    /// Times the step size was halved to keep the objective non-increasing.
    pub step_halvings: usize,
    pub final_learning_rate: f64,
}

/// Linear softmax classifier over sparse n-gram features.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T> {
    vocabulary: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `num_classes x vocabulary.len()`.
    weights: Vec<T>,
    bias: Vec<T>,
    num_classes: usize,
    config: TrainConfig,
    fingerprint: String,
}

pub type BuiltinModel = LinearModel<f64>;

type SparseRow<T> = Vec<(usize, T)>;

/// Lowercased unigrams followed by bigrams of adjacent words.
pub fn ngrams(text: &str) -> Vec<String> {
    let words: Vec<String> = tokenize(text)
        .tokens
        .into_iter()
        .filter(|t| t.is_word())
        .map(|t| t.text.to_lowercase())
        .collect();
    let mut out = words.clone();
    out.extend(words.windows(2).map(|w| format!("{} {}", w[0], w[1])));
    out
}

const MAGIC: &[u8; 8] = b"TTABOW\0\x01";
const FORMAT_VERSION: u32 = 1;

impl<T: Scalar> LinearModel<T> {
    pub fn from_parts(
        vocabulary: Vec<String>,
        weights: Vec<T>,
        bias: Vec<T>,
        num_classes: usize,
        config: TrainConfig,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::Config("model needs at least two classes".into()));
        }
        if bias.len() != num_classes || weights.len() != num_classes * vocabulary.len() {
            return Err(Error::Shape {
                expected: num_classes * vocabulary.len(),
                found: weights.len(),
            });
        }
        if weights.iter().chain(&bias).any(|w| !w.is_finite()) {
            return Err(Error::ModelFormat("non-finite parameter".into()));
        }
        let mut index = HashMap::with_capacity(vocabulary.len());
        for (i, v) in vocabulary.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::ModelFormat(format!("duplicate vocabulary entry {v:?}")));
            }
        }
        let mut model = LinearModel {
            vocabulary,
            index,
            weights,
            bias,
            num_classes,
            config,
            fingerprint: String::new(),
        };
        model.refresh_fingerprint();
        Ok(model)
    }

    fn refresh_fingerprint(&mut self) {
        let digest = Sha256::digest(self.to_bytes());
        let hex: String = digest.iter().take(16).map(|b| format!("{b:02x}")).collect();
        self.fingerprint = format!("builtin:{hex}");
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Sparse, L2-normalised count vector for `text`.
    pub fn features(&self, text: &str) -> SparseRow<T> {
        featurize(&self.index, text)
    }

    pub fn raw_logits(&self, text: &str) -> Vec<T> {
        score(&self.weights, &self.bias, self.vocabulary.len(), &self.features(text))
    }

    pub fn logits(&self, text: &str) -> Result<LogitVector<T>> {
        LogitVector::new(self.raw_logits(text))
    }

    pub fn train(examples: &[LabeledExample], num_classes: usize, config: TrainConfig) -> Result<(Self, TrainReport)> {
        if examples.is_empty() {
            return Err(Error::DegenerateData("no training examples".into()));
        }
        if let Some(bad) = examples.iter().find(|e| e.label.0 >= num_classes) {
            return Err(Error::DegenerateData(format!(
                "label {} of {:?} is outside [0, {num_classes})",
                bad.label, bad.doc.id
            )));
        }
        let present: BTreeSet<usize> = examples.iter().map(|e| e.label.0).collect();
        if present.len() < 2 {
            return Err(Error::DegenerateData("training data contains a single class".into()));
        }
        if num_classes < 2 {
            return Err(Error::DegenerateData("need at least two classes".into()));
        }

        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for e in examples {
            for g in ngrams(&e.doc.text) {
                *counts.entry(g).or_default() += 1;
            }
        }
        let vocabulary: Vec<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= config.min_count.max(1))
            .map(|(g, _)| g)
            .collect();
        let index: HashMap<String, usize> = vocabulary.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let v = vocabulary.len();
        let rows: Vec<SparseRow<T>> = examples.iter().map(|e| featurize(&index, &e.doc.text)).collect();
        let labels: Vec<usize> = examples.iter().map(|e| e.label.0).collect();

        let mut weights = vec![T::zero(); num_classes * v];
        let mut bias = vec![T::zero(); num_classes];
        let l2 = T::lit(config.l2);
        let mut lr = T::lit(config.learning_rate);
        let tol = T::lit(1e-9);
        let mut loss = objective(&weights, &bias, v, &rows, &labels, l2);
        let mut losses = vec![loss.to_f64().unwrap_or(f64::NAN)];
        let mut halvings = 0;

        for _ in 0..config.epochs {
            let (gw, gb) = gradient(&weights, &bias, v, num_classes, &rows, &labels, l2);
            let mut accepted = false;
            for _ in 0..60 {
                let nw: Vec<T> = weights.iter().zip(&gw).map(|(&w, &g)| w - lr * g).collect();
                let nb: Vec<T> = bias.iter().zip(&gb).map(|(&b, &g)| b - lr * g).collect();
                let nl = objective(&nw, &nb, v, &rows, &labels, l2);
                if nl <= loss + tol {
                    weights = nw;
                    bias = nb;
                    loss = nl;
                    accepted = true;
                    break;
                }
                lr = lr / T::lit(2.0);
                halvings += 1;
            }
            if !accepted {
                break;
            }
            losses.push(loss.to_f64().unwrap_or(f64::NAN));
        }

        let correct = rows
            .iter()
            .zip(&labels)
            .filter(|(x, &y)| argmax_slice(&score(&weights, &bias, v, x)).map(|c| c.0 == y).unwrap_or(false))
            .count();
        let report = TrainReport {
            losses,
            train_accuracy: correct as f64 / rows.len() as f64,
            step_halvings: halvings,
            final_learning_rate: lr.to_f64().unwrap_or(f64::NAN),
        };
        let model = Self::from_parts(vocabulary, weights, bias, num_classes, config)?;
        Ok((model, report))
    }

    /// Serialises to the versioned binary model format:
    ///
    /// ```text
    /// magic[8] version:u32 classes:u32 vocab:u32
    /// learning_rate:f64 epochs:u64 l2:f64 seed:u64 min_count:u64
    /// vocab × (len:u32 utf8[len])
    /// weights:f64[classes*vocab] bias:f64[classes]
    /// ```
    /// All integers and floats little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.num_classes as u32).to_le_bytes());
        out.extend_from_slice(&(self.vocabulary.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.config.learning_rate.to_le_bytes());
        out.extend_from_slice(&(self.config.epochs as u64).to_le_bytes());
        out.extend_from_slice(&self.config.l2.to_le_bytes());
        out.extend_from_slice(&self.config.seed.to_le_bytes());
        out.extend_from_slice(&(self.config.min_count as u64).to_le_bytes());
        for g in &self.vocabulary {
            out.extend_from_slice(&(g.len() as u32).to_le_bytes());
            out.extend_from_slice(g.as_bytes());
        }
        for w in self.weights.iter().chain(&self.bias) {
            out.extend_from_slice(&w.to_f64().expect("finite").to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::ModelFormat("bad magic header".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {version}")));
        }
        let classes = r.u32()? as usize;
        let vocab = r.u32()? as usize;
        let config = TrainConfig {
            learning_rate: r.f64()?,
            epochs: r.u64()? as usize,
            l2: r.f64()?,
            seed: r.u64()?,
            min_count: r.u64()? as usize,
        };
        let mut vocabulary = Vec::with_capacity(vocab.min(1 << 20));
        for _ in 0..vocab {
            let n = r.u32()? as usize;
            let s = std::str::from_utf8(r.take(n)?).map_err(|e| Error::ModelFormat(e.to_string()))?;
            vocabulary.push(s.to_string());
        }
        let mut params = Vec::with_capacity(classes * (vocab + 1));
        for _ in 0..classes * (vocab + 1) {
            params.push(T::from_f64(r.f64()?).ok_or_else(|| Error::ModelFormat("parameter out of range".into()))?);
        }
        if r.pos != bytes.len() {
            return Err(Error::ModelFormat("trailing bytes".into()));
        }
        let bias = params.split_off(classes * vocab);
        Self::from_parts(vocabulary, params, bias, classes, config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::ModelFormat("truncated file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

fn featurize<T: Scalar>(index: &HashMap<String, usize>, text: &str) -> SparseRow<T> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for g in ngrams(text) {
        if let Some(&i) = index.get(&g) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let norm = T::from_usize_lossy(counts.values().map(|c| c * c).sum()).sqrt();
    counts
        .into_iter()
        .map(|(i, c)| (i, T::from_usize_lossy(c) / norm))
        .collect()
}

fn score<T: Scalar>(weights: &[T], bias: &[T], v: usize, x: &[(usize, T)]) -> Vec<T> {
    bias.iter()
        .enumerate()
        .map(|(c, &b)| {
            let row = &weights[c * v..(c + 1) * v];
            x.iter().fold(b, |acc, &(i, xi)| acc + row[i] * xi)
        })
        .collect()
}

fn log_softmax_at<T: Scalar>(z: &[T], y: usize) -> T {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    let lse = max + z.iter().map(|&v| (v - max).exp()).sum::<T>().ln();
    z[y] - lse
}

fn objective<T: Scalar>(weights: &[T], bias: &[T], v: usize, rows: &[SparseRow<T>], labels: &[usize], l2: T) -> T {
    let n = T::from_usize_lossy(rows.len());
    let nll: T = rows
        .iter()
        .zip(labels)
        .map(|(x, &y)| -log_softmax_at(&score(weights, bias, v, x), y))
        .sum();
    let penalty: T = weights.iter().map(|&w| w * w).sum();
    nll / n + l2 / T::lit(2.0) * penalty
}

fn gradient<T: Scalar>(
    weights: &[T],
    bias: &[T],
    v: usize,
    classes: usize,
    rows: &[SparseRow<T>],
    labels: &[usize],
    l2: T,
) -> (Vec<T>, Vec<T>) {
    let n = T::from_usize_lossy(rows.len());
    let mut gw: Vec<T> = weights.iter().map(|&w| l2 * w).collect();
    let mut gb = vec![T::zero(); classes];
    for (x, &y) in rows.iter().zip(labels) {
        let z = score(weights, bias, v, x);
        let max = z.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = z.iter().map(|&s| (s - max).exp()).collect();
        let total: T = exps.iter().copied().sum();
        for c in 0..classes {
            let p = exps[c] / total;
            let err = (if c == y { p - T::one() } else { p }) / n;
            gb[c] = gb[c] + err;
            let row = &mut gw[c * v..(c + 1) * v];
            for &(i, xi) in x {
                row[i] = row[i] + err * xi;
            }
        }
    }
    (gw, gb)
}

impl<T: Scalar> Classifier for LinearModel<T> {
    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn fingerprint(&self) -> String {
        self.fingerprint.clone()
    }

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<Logits>> {
        texts.iter().map(|t| self.logits(t).map(|l| l.cast())).collect()
    }

    fn backend(&self) -> Backend {
        Backend::Builtin
    }

    fn metadata(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("vocabulary".to_string(), self.vocabulary.len().to_string()),
            ("epochs".to_string(), self.config.epochs.to_string()),
            ("seed".to_string(), self.config.seed.to_string()),
        ])
    }
}
